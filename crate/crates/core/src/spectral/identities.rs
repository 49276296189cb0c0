//! Finite-matrix forms of the two-tails identity, Stieltjes monotonicity and
//! the moment formula for return probabilities.

use serde::Serialize;

use super::dirichlet::{spectrum, DirichletOperator};
use super::eigen::dense_eigenvalues;
use crate::error::{Error, Result};
use crate::transforms::StepFn;

/// Eigenvalues within this distance of a threshold make a check inconclusive.
pub const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoTailsOutcome {
    Holds,
    Fails,
    /// Counts differ but an eigenvalue sits on a threshold.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoTails {
    pub lambda: f64,
    /// `rank E^{I-A²}_λ`.
    pub lhs: usize,
    /// `rank E^{I-A}_{1-√(1-λ)} + n - rank E^{I-A}_{1+√(1-λ)}`.
    pub rhs: usize,
    pub collision: bool,
    pub outcome: TwoTailsOutcome,
}

/// Spectra of `A` and `I - A²`, both from the dense solver.
pub struct TwoTailsSpectra {
    pub n: usize,
    a: Vec<f64>,
    a2: Vec<f64>,
}

impl TwoTailsSpectra {
    /// Verifies symmetry exactly and `‖A‖ ≤ 1` numerically.
    pub fn new(a: &[f64], n: usize) -> Result<TwoTailsSpectra> {
        if a.len() != n * n {
            return Err(Error::Precondition("matrix shape mismatch".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if a[i * n + j] != a[j * n + i] {
                    return Err(Error::Precondition(format!("A not symmetric at ({i}, {j})")));
                }
            }
        }
        let ev = dense_eigenvalues(a, n)?;
        if ev.iter().any(|x| x.abs() > 1.0 + 1e-12) {
            return Err(Error::Precondition("‖A‖ exceeds 1".into()));
        }
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| a[i * n + k] * a[k * n + j]).sum();
                b[i * n + j] = if i == j { 1.0 - s } else { -s };
            }
        }
        // symmetrize the rounding of the product
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (b[i * n + j] + b[j * n + i]);
                b[i * n + j] = m;
                b[j * n + i] = m;
            }
        }
        let a2 = dense_eigenvalues(&b, n)?;
        Ok(TwoTailsSpectra { n, a: ev, a2 })
    }

    pub fn check(&self, lambda: f64) -> Result<TwoTails> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Precondition(format!("λ = {lambda} outside [0, 1]")));
        }
        let s = (1.0 - lambda).sqrt();
        let count = |vals: &[f64], thr: f64| vals.iter().filter(|&&v| v <= thr + THRESHOLD_TOL * 1e-3).count();
        let near = |vals: &[f64], thr: f64| vals.iter().any(|&v| (v - thr).abs() <= THRESHOLD_TOL);
        let one_minus_a: Vec<f64> = self.a.iter().map(|x| 1.0 - x).collect();
        let lhs = count(&self.a2, lambda);
        let rhs = count(&one_minus_a, 1.0 - s) + self.n - count(&one_minus_a, 1.0 + s);
        let collision = near(&self.a2, lambda) || near(&one_minus_a, 1.0 - s) || near(&one_minus_a, 1.0 + s);
        let outcome = if lhs == rhs {
            TwoTailsOutcome::Holds
        } else if collision {
            TwoTailsOutcome::Inconclusive
        } else {
            TwoTailsOutcome::Fails
        };
        Ok(TwoTails {
            lambda,
            lhs,
            rhs,
            collision,
            outcome,
        })
    }
}

/// Two-tails identity for one `λ`; see [`TwoTailsSpectra`] for many.
pub fn two_tails_check(a: &[f64], n: usize, lambda: f64) -> Result<TwoTails> {
    TwoTailsSpectra::new(a, n)?.check(lambda)
}

/// `Σ f(x_i)·(F(x_i) - F(x_i⁻))` over the jump points of `F` in `[a, b]`.
pub fn stieltjes_integral(f: &dyn Fn(f64) -> f64, big_f: &StepFn, a: f64, b: f64) -> f64 {
    let terms: Vec<f64> = big_f
        .jumps()
        .filter(|&(x, _)| x >= a && x <= b)
        .map(|(x, j)| f(x) * j)
        .collect();
    crate::io::pairwise_sum(&terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub t: usize,
    /// `⟨δ_e, (I - Δ_Ω)^{2t} δ_e⟩`, the walk killed on leaving `Ω`.
    pub killed: f64,
    /// `∫ (1-λ)^{2t} dN_Ω(λ) = tr((I - Δ_Ω)^{2t}) / |Ω|`.
    pub trace_form: f64,
}

/// Both sides of the moment formula on `Ω`; `origin` indexes `e` in `Ω`.
/// They agree only in the limit `Ω → Γ`, so nothing is asserted here.
pub fn moment_consistency(op: &DirichletOperator, origin: usize, t: usize) -> Result<MomentReport> {
    if origin >= op.len() {
        return Err(Error::Precondition("origin outside Ω".into()));
    }
    let n = op.len();
    let mut x = vec![0.0; n];
    x[origin] = 1.0;
    let mut y = vec![0.0; n];
    // killed = ‖R^t δ_e‖², R symmetric
    for _ in 0..t {
        op.apply(&x, &mut y);
        for i in 0..n {
            y[i] = x[i] - y[i];
        }
        std::mem::swap(&mut x, &mut y);
    }
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let killed = crate::io::pairwise_sum(&sq);
    let ev = spectrum(op)?.eigenvalues;
    let terms: Vec<f64> = ev.iter().map(|l| (1.0 - l).powi(2 * t as i32)).collect();
    let trace_form = crate::io::pairwise_sum(&terms) / n as f64;
    Ok(MomentReport {
        t,
        killed,
        trace_form,
    })
}
