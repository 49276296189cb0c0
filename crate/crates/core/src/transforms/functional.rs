use serde::Serialize;

use super::monotone::{Direction, MonotoneFn};
use super::ode::dopri5;
use super::quadrature::integrate;
use super::regularity::compose_exp;
use crate::error::{Error, Result};

pub const SOLVER_RTOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Start of the integration when `(L∘exp)(0) = ∞`.
pub const BOOTSTRAP_V: f64 = 1e-3;

/// Solution of `t = ∫_0^{v(t)} ds / (L∘exp)(s)` on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalSolution {
    pub ts: Vec<f64>,
    pub vs: Vec<f64>,
    /// `v'(t) = (L∘exp)(v(t))`.
    pub rates: Vec<f64>,
    /// Largest `|t - ∫_0^{v(t)} ds/(L∘exp)(s)| / t`.
    pub max_residual: f64,
    /// `(t0, v0)` the stepping started from.
    pub start: (f64, f64),
}

impl FunctionalSolution {
    /// Cubic Hermite interpolation with the exact slopes; `None` off the grid.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let n = self.ts.len();
        if n == 0 || t < self.ts[0] || t > self.ts[n - 1] {
            return None;
        }
        let i = self.ts.partition_point(|&s| s <= t);
        if i == n {
            return Some(self.vs[n - 1]);
        }
        if i == 0 {
            return Some(self.vs[0]);
        }
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (h00, h10) = (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s);
        let (h01, h11) = (-2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
        Some(h00 * self.vs[i - 1] + h10 * h * self.rates[i - 1] + h01 * self.vs[i] + h11 * h * self.rates[i])
    }
}

fn check_decreasing(l: &MonotoneFn) -> Result<()> {
    if l.direction != Direction::Decreasing {
        return Err(Error::Precondition("L must be decreasing".into()));
    }
    Ok(())
}

/// Bootstrap point: `(0, 0)` when `(L∘exp)(0)` is finite, otherwise
/// `(∫_0^{v0} ds/(L∘exp)(s), v0)`.
fn start_point(le: &dyn Fn(f64) -> f64) -> Result<(f64, f64)> {
    let f0 = le(0.0);
    if f0.is_finite() && f0 > 0.0 {
        return Ok((0.0, 0.0));
    }
    let t0 = integrate(&|s| 1.0 / le(s), 0.0, BOOTSTRAP_V, 1e-12)?;
    Ok((t0, BOOTSTRAP_V))
}

/// `v` with `∫_0^v ds/(L∘exp)(s) = t` for `t ≤ t0`, by bisection.
fn invert_head(le: &dyn Fn(f64) -> f64, t: f64, v0: f64) -> Result<f64> {
    let (mut a, mut b) = (0.0, v0);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if integrate(&|s| 1.0 / le(s), 0.0, m, 1e-12)? < t {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn solve_with(le: &dyn Fn(f64) -> f64, ts: &[f64], rtol: f64) -> Result<FunctionalSolution> {
    let (t0, v0) = start_point(le)?;
    let split = ts.partition_point(|&t| t <= t0);
    let mut vs = Vec::with_capacity(ts.len());
    for &t in &ts[..split] {
        vs.push(if t <= 0.0 { 0.0 } else { invert_head(le, t, v0)? });
    }
    let (tail, _) = dopri5(le, t0, v0, &ts[split..], rtol, 1e-14)?;
    vs.extend(tail);
    // cumulative residual check
    let mut acc = 0.0;
    let mut prev_v = 0.0;
    let mut max_residual: f64 = 0.0;
    for (&t, &v) in ts.iter().zip(&vs) {
        if v > prev_v {
            acc += integrate(&|s| 1.0 / le(s), prev_v, v, 1e-13)?;
            prev_v = v;
        }
        if t > 0.0 {
            max_residual = max_residual.max((t - acc).abs() / t);
        }
    }
    let rates = vs.iter().map(|&v| le(v)).collect();
    Ok(FunctionalSolution {
        ts: ts.to_vec(),
        vs,
        rates,
        max_residual,
        start: (t0, v0),
    })
}

/// Solves `v'(t) = (L∘exp)(v(t))`, `v(0) = 0` on the increasing grid `ts`
/// and checks the integral form a posteriori.
pub fn solve_functional_equation(l: &MonotoneFn, ts: &[f64]) -> Result<FunctionalSolution> {
    check_decreasing(l)?;
    if ts.windows(2).any(|w| !(w[0] < w[1])) || ts.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Precondition("time grid must be increasing and nonnegative".into()));
    }
    let le = compose_exp(l);
    let sol = solve_with(&*le, ts, SOLVER_RTOL)?;
    if sol.max_residual <= RESIDUAL_TOL {
        return Ok(sol);
    }
    let refined = solve_with(&*le, ts, SOLVER_RTOL * 1e-3)?;
    if refined.max_residual <= RESIDUAL_TOL {
        return Ok(refined);
    }
    Err(Error::Convergence {
        what: "functional equation residual".into(),
        residual: refined.max_residual,
    })
}

/// Checks of `v(2t) ≤ 2v(t)`, `v(t)/t` decreasing and the sandwich
/// `(L∘exp∘v)(t) ≤ v(t)/t ≤ D (L∘exp∘v)(t)` on the solution grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalInvariants {
    pub subadditive: bool,
    /// `max (v(2t) - 2v(t)) / v(t)` over grid points with `2t` in range.
    pub max_doubling_excess: f64,
    pub ratio_decreasing: bool,
    pub lower_sandwich: bool,
    /// Measured `D = max (v/t) / (L∘exp)(v)`.
    pub d_measured: f64,
    /// Measured `C = max (L∘exp)(v/2) / (L∘exp)(v)`.
    pub c_doubling: f64,
    pub pass: bool,
}

/// Slack for solver error in every comparison.
const INVARIANT_TOL: f64 = 1e-7;

pub fn functional_equation_invariants(l: &MonotoneFn, sol: &FunctionalSolution) -> Result<FunctionalInvariants> {
    check_decreasing(l)?;
    let le = compose_exp(l);
    let mut max_doubling_excess = f64::NEG_INFINITY;
    let mut ratio_decreasing = true;
    let mut lower_sandwich = true;
    let mut d_measured: f64 = 0.0;
    let mut c_doubling: f64 = 0.0;
    let mut prev_ratio = f64::INFINITY;
    for (&t, &v) in sol.ts.iter().zip(&sol.vs) {
        if t <= 0.0 || v <= 0.0 {
            continue;
        }
        if let Some(v2) = sol.value_at(2.0 * t) {
            max_doubling_excess = max_doubling_excess.max((v2 - 2.0 * v) / v);
        }
        let ratio = v / t;
        if ratio > prev_ratio * (1.0 + INVARIANT_TOL) {
            ratio_decreasing = false;
        }
        prev_ratio = ratio;
        let rate = le(v);
        if ratio < rate * (1.0 - INVARIANT_TOL) {
            lower_sandwich = false;
        }
        d_measured = d_measured.max(ratio / rate);
        c_doubling = c_doubling.max(le(v / 2.0) / rate);
    }
    let subadditive = !(max_doubling_excess > INVARIANT_TOL);
    let pass = subadditive && ratio_decreasing && lower_sandwich && d_measured <= 2.0 * c_doubling * (1.0 + INVARIANT_TOL);
    Ok(FunctionalInvariants {
        subadditive,
        max_doubling_excess,
        ratio_decreasing,
        lower_sandwich,
        d_measured,
        c_doubling,
        pass,
    })
}

/// `γ` with `t = ∫_1^{γ(t)} dv / (Λ(v) v)`, integrated directly as
/// `γ' = Λ(γ) γ`, plus the largest relative gap to `exp ∘ v`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaSolution {
    pub ts: Vec<f64>,
    pub gammas: Vec<f64>,
    pub alignment_error: f64,
}

pub fn coulhon_grigoryan_gamma(lambda: &MonotoneFn, ts: &[f64]) -> Result<GammaSolution> {
    let v = solve_functional_equation(lambda, ts)?;
    let (t0, v0) = v.start;
    let g0 = v0.exp();
    let rhs = |g: f64| lambda.eval(g) * g;
    let split = ts.partition_point(|&t| t <= t0);
    let mut gammas: Vec<f64> = v.vs[..split].iter().map(|x| x.exp()).collect();
    let (tail, _) = dopri5(&rhs, t0, g0, &ts[split..], SOLVER_RTOL * 1e-2, 1e-14)?;
    gammas.extend(tail);
    let alignment_error = gammas
        .iter()
        .zip(&v.vs)
        .map(|(g, x)| (g - x.exp()).abs() / x.exp())
        .fold(0.0, f64::max);
    Ok(GammaSolution {
        ts: ts.to_vec(),
        gammas,
        alignment_error,
    })
}
