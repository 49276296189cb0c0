//! Least-squares exponent fits in linearizing coordinates.

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum span of the data in decades of `x`.
pub const MIN_DECADES: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `y = b·x^a`: slope of `ln y` against `ln x`.
    Power,
    /// `y = exp(-b·x^a)`: slope of `ln(-ln y)` against `ln x`.
    StretchedExp,
    /// `y = b·(ln x)^a`: slope of `ln y` against `ln ln x`.
    LogPower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub model: FitModel,
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in the linearized coordinates.
    pub residual: f64,
    pub points: usize,
    pub decades: f64,
}

fn linearize(model: FitModel, x: f64, y: f64) -> Option<(f64, f64)> {
    let (u, w) = match model {
        FitModel::Power => (x.ln(), y.ln()),
        FitModel::StretchedExp => (x.ln(), (-y.ln()).ln()),
        FitModel::LogPower => (x.ln().ln(), y.ln()),
    };
    (u.is_finite() && w.is_finite()).then_some((u, w))
}

/// Fits `model` to `(xs, ys)`, requiring [`MIN_DECADES`] of `x`.
pub fn fit_exponent(xs: &[f64], ys: &[f64], model: FitModel) -> Result<Fit> {
    fit_exponent_with(xs, ys, model, MIN_DECADES)
}

/// As [`fit_exponent`] with an explicit minimum span.
pub fn fit_exponent_with(xs: &[f64], ys: &[f64], model: FitModel, min_decades: f64) -> Result<Fit> {
    if xs.len() != ys.len() {
        return Err(Error::Precondition("x and y lengths differ".into()));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, _)| **x > 0.0)
        .filter_map(|(&x, &y)| linearize(model, x, y))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Precondition(format!("{} usable points", pts.len())));
    }
    let xmin = xs.iter().copied().filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().copied().fold(0.0, f64::max);
    let decades = (xmax / xmin).log10();
    if decades < min_decades - 1e-9 {
        return Err(Error::Precondition(format!(
            "data spans {decades:.3} decades, need {min_decades}"
        )));
    }
    let n = pts.len() as f64;
    let (mu, mw) = pts.iter().fold((0.0, 0.0), |(a, b), (u, w)| (a + u / n, b + w / n));
    let (suu, suw) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (u, w)| (a + (u - mu) * (u - mu), b + (u - mu) * (w - mw)));
    if suu == 0.0 {
        return Err(Error::Precondition("all points share one abscissa".into()));
    }
    let slope = suw / suu;
    let intercept = mw - slope * mu;
    let rss: f64 = pts.iter().map(|(u, w)| (w - intercept - slope * u).powi(2)).sum();
    Ok(Fit {
        model,
        exponent: slope,
        intercept,
        residual: (rss / n).sqrt(),
        points: pts.len(),
        decades,
    })
}

/// `count` log-spaced abscissae on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_inverse_power() {
        let xs = log_space(1.0, 1e3, 40);
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
        let f = fit_exponent(&xs, &ys, FitModel::Power).unwrap();
        assert!((f.exponent + 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn too_few_decades() {
        let xs = log_space(1.0, 50.0, 10);
        let ys = xs.clone();
        assert!(matches!(fit_exponent(&xs, &ys, FitModel::Power), Err(Error::Precondition(_))));
        assert!(fit_exponent_with(&xs, &ys, FitModel::Power, 1.0).is_ok());
    }

    #[test]
    fn planted_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs = log_space(10.0, 1e4, 60);
        let cases: [(FitModel, f64, fn(f64, f64) -> f64, f64); 3] = [
            (FitModel::Power, -1.5, |x, a| 3.0 * x.powf(a), 0.01),
            (FitModel::StretchedExp, 0.5, |x, a| (-0.7 * x.powf(a)).exp(), 0.05),
            (FitModel::LogPower, -2.0, |x, a| 2.0 * x.ln().powf(a), 0.05),
        ];
        for (model, a, f, tol) in cases {
            let ys: Vec<f64> = xs.iter().map(|&x| f(x, a)).collect();
            let fit = fit_exponent(&xs, &ys, model).unwrap();
            assert!((fit.exponent - a).abs() < 1e-6, "{model:?}");
            let noisy: Vec<f64> = ys.iter().map(|y| y * (1.0 + rng.gen_range(-0.01..0.01))).collect();
            let fit = fit_exponent(&xs, &noisy, model).unwrap();
            assert!((fit.exponent - a).abs() < tol, "{model:?} noisy {}", fit.exponent);
        }
    }
}
