use serde::Serialize;

use super::monotone::{Direction, MonotoneFn, Repr, WINDOW};
use super::step::StepFn;
use crate::error::{Error, Result};

/// Grid density of the bracketing stage.
pub const POINTS_PER_DECADE: usize = 64;
/// Number of local grid minima refined by golden section.
pub const STARTS: usize = 8;
const GOLDEN_REL_TOL: f64 = 1e-9;

/// Value and location of an infimum/supremum over the window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub argument: f64,
    pub window: (f64, f64),
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round() as usize;
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

fn golden_min(h: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    // in log coordinates, so the tolerance is relative in x
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut la, mut lb) = (a.ln(), b.ln());
    let mut c = lb - r * (lb - la);
    let mut d = la + r * (lb - la);
    let (mut fc, mut fd) = (h(c.exp()), h(d.exp()));
    while (lb - la) > GOLDEN_REL_TOL {
        if fc <= fd {
            lb = d;
            d = c;
            fd = fc;
            c = lb - r * (lb - la);
            fc = h(c.exp());
        } else {
            la = c;
            c = d;
            fc = fd;
            d = la + r * (lb - la);
            fd = h(d.exp());
        }
    }
    a = la.exp();
    b = lb.exp();
    let x = (0.5 * (a.ln() + b.ln())).exp();
    (h(x), x)
}

/// `inf_{x ∈ window} h(x)` by log-grid bracketing and multi-start golden
/// section. Errors if the minimum sits on the window edge.
pub fn minimize(h: &dyn Fn(f64) -> f64, window: (f64, f64)) -> Result<Extremum> {
    let grid = log_grid(window.0, window.1, POINTS_PER_DECADE);
    let vals: Vec<f64> = grid.iter().map(|&x| h(x)).collect();
    let n = grid.len();
    let mut locals: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = vals[i];
            v.is_finite()
                && (i == 0 || v <= vals[i - 1] || vals[i - 1].is_nan())
                && (i == n - 1 || v <= vals[i + 1] || vals[i + 1].is_nan())
        })
        .collect();
    if locals.is_empty() {
        return Err(Error::Domain("objective has no finite value on the window".into()));
    }
    locals.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    locals.truncate(STARTS);
    let mut best = Extremum {
        value: f64::INFINITY,
        argument: f64::NAN,
        window,
    };
    for &i in &locals {
        let (v, x) = if i == 0 || i == n - 1 {
            (vals[i], grid[i])
        } else {
            golden_min(h, grid[i - 1], grid[i + 1])
        };
        let (v, x) = if vals[i] < v { (vals[i], grid[i]) } else { (v, x) };
        if v < best.value {
            best.value = v;
            best.argument = x;
        }
    }
    if best.argument >= window.1 * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "infimum not attained inside the window (still decreasing at {:e})",
            window.1
        )));
    }
    Ok(best)
}

/// `Le_M(t) = inf{t x + M(x) : x > 0}`.
pub fn legendre(m: &MonotoneFn, t: f64) -> Result<Extremum> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("t = {t} must be positive")));
    }
    if m.direction != Direction::Decreasing {
        return Err(Error::Precondition("Legendre transform needs a decreasing M".into()));
    }
    if let Repr::Step { step } = &m.repr {
        return legendre_step(step, t);
    }
    let window = (m.domain.0.max(WINDOW.0), m.domain.1.min(WINDOW.1));
    // M must be nonnegative and blow up at 0
    let probe = log_grid(window.0, window.1, 4);
    if probe.iter().any(|&x| m.eval(x) < 0.0) {
        return Err(Error::Precondition("M must be positive".into()));
    }
    if !(m.eval(window.0) > m.eval(window.1)) {
        return Err(Error::Precondition("M must decrease to its limit and blow up at 0".into()));
    }
    minimize(&|x| t * x + m.eval(x), window)
}

/// Exact Legendre transform of a right-continuous decreasing step `M`:
/// the infimum is attained at a jump point (or as `x → 0` on the base).
pub fn legendre_step(m: &StepFn, t: f64) -> Result<Extremum> {
    if !m.is_decreasing() {
        return Err(Error::Precondition("Legendre transform needs a decreasing M".into()));
    }
    let mut best = Extremum {
        value: if m.base.is_finite() { m.base } else { f64::INFINITY },
        argument: 0.0,
        window: (0.0, f64::INFINITY),
    };
    for (&x, &v) in m.points.iter().zip(&m.values) {
        let h = t * x + v;
        if h < best.value {
            best.value = h;
            best.argument = x;
        }
    }
    if !best.value.is_finite() {
        return Err(Error::Domain("M is infinite everywhere".into()));
    }
    Ok(best)
}

/// `Le*_G(t) = sup{-t x + G(x) : x ≥ 0}`.
pub fn legendre_conjugate(g: &MonotoneFn, t: f64) -> Result<Extremum> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("t = {t} must be positive")));
    }
    if g.direction != Direction::Increasing {
        return Err(Error::Precondition("conjugate transform needs an increasing G".into()));
    }
    let window = (g.domain.0.max(WINDOW.0), g.domain.1.min(WINDOW.1));
    check_sublinear(&|x| g.eval(x), window)?;
    let mut best = minimize(&|x| t * x - g.eval(x), window)?;
    best.value = -best.value;
    let g0 = g.eval(0.0);
    if g0.is_finite() && g0 > best.value {
        best.value = g0;
        best.argument = 0.0;
    }
    Ok(best)
}

/// `G(x)/x → 0`: over the last six decades of the window the ratio must
/// drop by at least a factor 2 and keep decreasing.
pub fn check_sublinear(g: &dyn Fn(f64) -> f64, window: (f64, f64)) -> Result<()> {
    let hi = window.1;
    let lo = (hi * 1e-6).max(window.0);
    let xs = log_grid(lo, hi, 4);
    let ratios: Vec<f64> = xs.iter().map(|&x| g(x) / x).collect();
    let decreasing = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    if !decreasing || !(ratios[ratios.len() - 1] <= 0.5 * ratios[0]) {
        return Err(Error::Precondition("G(x)/x does not tend to 0 on the window".into()));
    }
    Ok(())
}

/// Outcome of the Laplace-transform sandwich for one `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub t: f64,
    pub lower: f64,
    pub integral: f64,
    pub upper: f64,
    pub pass: bool,
}

/// `exp(-Le_M(t)) ≤ ∫ e^{-tλ} dF(λ) ≤ (1 + Le_M(t)) exp(-Le_M(t))` with
/// `M = -log F`, the integral summed exactly over the jumps of `F`.
///
/// `F` may vanish on an initial interval `(0, λ_min)`; `M = ∞` there and
/// both bounds remain valid.
pub fn bcs_sandwich_check(f: &StepFn, t: f64) -> Result<Sandwich> {
    if !f.is_increasing() {
        return Err(Error::Precondition("F must be nondecreasing".into()));
    }
    if f.base != 0.0 || f.points.first().is_some_and(|&p| p <= 0.0) {
        return Err(Error::Precondition("F(0) must be 0".into()));
    }
    if f.last_value() > 1.0 + 1e-15 {
        return Err(Error::Precondition("F must be bounded by 1".into()));
    }
    if f.points.is_empty() {
        return Err(Error::Precondition("F must not vanish identically".into()));
    }
    let m = f.map_values(|v| if v > 0.0 { -v.ln() } else { f64::INFINITY });
    let le = legendre_step(&m, t)?.value;
    let mut terms: Vec<f64> = f.jumps().map(|(x, dj)| (-t * x).exp() * dj).collect();
    terms.sort_by(f64::total_cmp);
    let integral = crate::io::pairwise_sum(&terms);
    let lower = (-le).exp();
    let upper = (1.0 + le) * (-le).exp();
    let tol = 1e-12;
    let pass = lower <= integral * (1.0 + tol) && integral <= upper * (1.0 + tol);
    Ok(Sandwich {
        t,
        lower,
        integral,
        upper,
        pass,
    })
}
