use serde::Serialize;

use super::monotone::{Direction, MonotoneFn};
use crate::error::{Error, Result};

/// Default lower threshold on the doubling constant.
pub const DEFAULT_MIN_C: f64 = 1e-6;

/// Finite-window doubling diagnostic for `L(2x) ≥ c L(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingReport {
    pub window: (f64, f64),
    pub probes: usize,
    /// `min L(2x)/L(x)` over the probes.
    pub c_estimate: f64,
    /// Ratio at the window end divided by the ratio one decade earlier;
    /// well below 1 means the ratio is still falling.
    pub last_decade_trend: f64,
    pub pass: bool,
}

/// `probes` log-spaced points in `window` (inclusive).
pub fn log_probes(window: (f64, f64), probes: usize) -> Vec<f64> {
    let n = probes.max(2);
    let (a, b) = (window.0.ln(), window.1.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Never a proof: reports the smallest observed ratio and whether it looks
/// bounded away from zero on the window.
pub fn doubling_check(l: &dyn Fn(f64) -> f64, window: (f64, f64), probes: usize, min_c: f64) -> DoublingReport {
    let xs = log_probes(window, probes);
    let ratios: Vec<f64> = xs.iter().map(|&x| l(2.0 * x) / l(x)).collect();
    let c_estimate = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_start = window.1 / 10.0;
    let first_tail = xs.iter().position(|&x| x >= tail_start).unwrap_or(0);
    let last = ratios[ratios.len() - 1];
    let last_decade_trend = if ratios[first_tail] > 0.0 { last / ratios[first_tail] } else { 0.0 };
    // a ratio sliding to zero drops by orders of magnitude within a decade
    let pass = c_estimate.is_finite() && c_estimate >= min_c && last_decade_trend >= 0.5;
    DoublingReport {
        window,
        probes: xs.len(),
        c_estimate,
        last_decade_trend,
        pass,
    }
}

/// `x ↦ L(exp(x))`, symbolic for templates so that `log ∘ exp` cancels.
pub fn compose_exp(l: &MonotoneFn) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
    match l.expr() {
        Some(e) => {
            let composed = e.compose(&super::expr::Expr::var().exp());
            Box::new(move |s| composed.eval(s))
        }
        None => {
            let l = l.clone();
            Box::new(move |s| l.eval(s.exp()))
        }
    }
}

/// Averaging smoothing `L_ct(x) = (2/x) ∫_{x/2}^x L(s) ds`, after a
/// doubling diagnostic of `L` on `window`.
pub fn smooth(l: MonotoneFn, window: (f64, f64)) -> Result<MonotoneFn> {
    if l.direction != Direction::Decreasing {
        return Err(Error::Precondition("smoothing needs a decreasing L".into()));
    }
    let report = doubling_check(&|x| l.eval(x), window, 200, DEFAULT_MIN_C);
    if !report.pass {
        return Err(Error::Precondition(format!(
            "L is not doubling on [{:e}, {:e}] (c = {:e})",
            window.0, window.1, report.c_estimate
        )));
    }
    Ok(l.smoothed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::expr::Expr;
    use crate::transforms::step::StepFn;

    #[test]
    fn log_square_profile_after_exp() {
        let l = MonotoneFn::template(Expr::log_power(-2.0), Direction::Decreasing);
        let le = compose_exp(&l);
        let r = doubling_check(&*le, (10.0, 1e6), 100, DEFAULT_MIN_C);
        assert!((r.c_estimate - 0.25).abs() < 1e-12);
        assert!(r.pass);
        // for L itself the ratio tends to 1
        let direct = doubling_check(&|x| l.eval(x), (10.0, 1e6), 100, DEFAULT_MIN_C);
        assert!(direct.c_estimate > 0.5 && direct.pass);
    }

    #[test]
    fn exponential_decay_fails() {
        let r = doubling_check(&|s: f64| (-s).exp(), (1.0, 100.0), 50, DEFAULT_MIN_C);
        assert!(!r.pass);
        let r = doubling_check(&|s: f64| (-s).exp(), (1.0, 5.0), 50, DEFAULT_MIN_C);
        assert!(!r.pass, "trend must catch the slide: {r:?}");
        let c = doubling_check(&|_| 3.0, (1.0, 100.0), 50, DEFAULT_MIN_C);
        assert_eq!(c.c_estimate, 1.0);
        assert!(c.pass);
    }

    #[test]
    fn smoothing_halving_steps() {
        let points: Vec<f64> = (0..20).map(|k| 2f64.powi(k)).collect();
        let values: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k + 1)).collect();
        let step = StepFn::new(1.0, points, values).unwrap();
        let l = MonotoneFn::step(step).unwrap();
        let s = smooth(l.clone(), (1.0, 1e5)).unwrap();
        let mut prev = f64::INFINITY;
        for x in log_probes((1.0, 1e5), 1000) {
            let v = s.eval(x);
            assert!(v <= prev * (1.0 + 1e-12));
            assert!(v >= l.eval(x) * (1.0 - 1e-12));
            assert!(v <= 2.0 * l.eval(x) * (1.0 + 1e-12));
            prev = v;
        }
        let constant = MonotoneFn::template(Expr::constant(2.0), Direction::Decreasing);
        let sc = smooth(constant, (1.0, 10.0)).unwrap();
        assert!((sc.eval(3.0) - 2.0).abs() < 1e-12);
    }
}
