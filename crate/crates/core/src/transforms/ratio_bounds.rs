//! Bounds on `M` from bounds on its Legendre transform.

use serde::{Deserialize, Serialize};

use super::legendre::{check_sublinear, legendre_conjugate};
use super::monotone::{Direction, Interpolation, MonotoneFn, SampledFn, WINDOW};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum BoundClause {
    /// `M(λ) ≤ G∘(G/id)⁻¹(λ)` given `Le_M ≤ G`.
    Upper,
    /// `M(λ) ≥ Le*_G(λ)` given `Le_M ≥ G`.
    Conjugate,
    /// `Le*_G(λ) ≥ (1-ε) G∘(G/id)⁻¹(λ/ε)`.
    ConjugateLower { eps: f64 },
}

/// `s` with `G(s)/s = y`, for `G/id` strictly decreasing on the window.
pub fn ratio_inverse(g: &MonotoneFn, y: f64) -> Result<f64> {
    let window = (g.domain.0.max(WINDOW.0), g.domain.1.min(WINDOW.1));
    let ratio = |s: f64| g.eval(s) / s;
    let (lo, hi) = (ratio(window.0), ratio(window.1));
    if !(y < lo && y > hi) {
        return Err(Error::Domain(format!(
            "{y:e} outside the range ({hi:e}, {lo:e}) of G/id on the window"
        )));
    }
    let (mut a, mut b) = (window.0.ln(), window.1.ln());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if ratio(m.exp()) > y {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

fn check_hypotheses(g: &MonotoneFn) -> Result<()> {
    if g.direction != Direction::Increasing {
        return Err(Error::Precondition("G must be increasing".into()));
    }
    let window = (g.domain.0.max(WINDOW.0), g.domain.1.min(WINDOW.1));
    check_sublinear(&|x| g.eval(x), window)?;
    let probes = super::regularity::log_probes(window, 97);
    let ratios: Vec<f64> = probes.iter().map(|&s| g.eval(s) / s).collect();
    if ratios.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Precondition("G/id is not strictly decreasing on the window".into()));
    }
    Ok(())
}

/// Value of one clause's bound at `λ`.
pub fn bound_value(g: &MonotoneFn, clause: BoundClause, lambda: f64) -> Result<f64> {
    match clause {
        BoundClause::Upper => Ok(g.eval(ratio_inverse(g, lambda)?)),
        BoundClause::Conjugate => Ok(legendre_conjugate(g, lambda)?.value),
        BoundClause::ConjugateLower { eps } => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1)")));
            }
            Ok((1.0 - eps) * g.eval(ratio_inverse(g, lambda / eps)?))
        }
    }
}

/// The clause's bound sampled on `lambdas`, as a decreasing function.
pub fn prop24_bounds(g: &MonotoneFn, clause: BoundClause, lambdas: &[f64]) -> Result<MonotoneFn> {
    check_hypotheses(g)?;
    let ys = lambdas
        .iter()
        .map(|&l| bound_value(g, clause, l))
        .collect::<Result<Vec<f64>>>()?;
    MonotoneFn::sampled(SampledFn::new(lambdas.to_vec(), ys, Interpolation::LogLog)?, Direction::Decreasing)
}

/// Default `ε` for the third clause.
pub const DEFAULT_EPS: f64 = 0.5;
