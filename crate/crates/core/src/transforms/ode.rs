//! Dormand–Prince 5(4) for scalar autonomous problems `y' = f(y)`.

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;

/// Integration statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates from `(t0, y0)` and returns `y` at each of the increasing
/// `targets` (all `≥ t0`); steps are clipped to land on targets exactly.
pub fn dopri5(
    f: &dyn Fn(f64) -> f64,
    t0: f64,
    y0: f64,
    targets: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<(Vec<f64>, OdeStats)> {
    if targets.windows(2).any(|w| w[1] < w[0]) || targets.first().is_some_and(|&t| t < t0) {
        return Err(Error::Precondition("ODE targets must increase from t0".into()));
    }
    let mut out = Vec::with_capacity(targets.len());
    let mut stats = OdeStats::default();
    let (mut t, mut y) = (t0, y0);
    let mut k1 = f(y);
    let mut h = {
        let span = targets.last().map_or(1.0, |&e| e - t0).max(1e-300);
        (0.01 * (y.abs().max(atol) / k1.abs().max(1e-300))).min(span).max(span * 1e-12)
    };
    for &target in targets {
        while t < target {
            if stats.accepted + stats.rejected > MAX_STEPS {
                return Err(Error::Convergence {
                    what: "ODE step budget exhausted".into(),
                    residual: target - t,
                });
            }
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            let mut k = [0.0; 7];
            k[0] = k1;
            for s in 1..7 {
                let inc: f64 = (0..s).map(|j| A[s][j] * k[j]).sum();
                k[s] = f(y + step * inc);
            }
            let y5 = y + step * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
            let y4 = y + step * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
            let scale = atol + rtol * y.abs().max(y5.abs());
            let err = ((y5 - y4) / scale).abs();
            if err <= 1.0 && y5.is_finite() {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y = y5;
                k1 = k[6];
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || step >= h {
                    h = step * grow;
                }
            } else {
                stats.rejected += 1;
                let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
                h = step * shrink;
                if h < 1e-14 * t.abs().max(1e-300) {
                    return Err(Error::Convergence {
                        what: "ODE step size underflow".into(),
                        residual: err,
                    });
                }
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let targets = [0.5, 1.0, 2.0, 5.0];
        let (ys, _) = dopri5(&|y| y, 0.0, 1.0, &targets, 1e-10, 1e-14).unwrap();
        for (t, y) in targets.iter().zip(&ys) {
            assert!((y - t.exp()).abs() <= 1e-8 * t.exp());
        }
    }

    #[test]
    fn decaying_rate() {
        // y' = exp(-y), y(0) = 0  =>  y = log(1 + t)
        let targets: Vec<f64> = (1..=40).map(|k| 1.5f64.powi(k)).collect();
        let (ys, _) = dopri5(&|y| (-y).exp(), 0.0, 0.0, &targets, 1e-10, 1e-14).unwrap();
        for (t, y) in targets.iter().zip(&ys) {
            assert!((y - t.ln_1p()).abs() <= 1e-8 * t.ln_1p());
        }
    }
}
