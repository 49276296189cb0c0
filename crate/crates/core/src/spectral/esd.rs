use serde::Serialize;

use super::dirichlet::{spectrum, DirichletOperator};
use crate::error::Result;
use crate::transforms::StepFn;

/// Eigenvalues closer than this (times `‖Δ‖ ≤ 2`) count as one jump.
pub const TIE_TOL: f64 = 1e-12;

/// Normalized eigenvalue counting function `λ ↦ #{λ_i ≤ λ}/|Ω|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Esd {
    pub size: usize,
    pub step: StepFn,
}

impl Esd {
    /// From ascending eigenvalues.
    pub fn from_eigenvalues(sorted: &[f64]) -> Esd {
        Esd {
            size: sorted.len(),
            step: StepFn::counting(sorted, TIE_TOL * 2.0),
        }
    }

    pub fn value(&self, lambda: f64) -> f64 {
        self.step.value(lambda)
    }

    /// Smallest eigenvalue.
    pub fn bottom(&self) -> f64 {
        self.step.points.first().copied().unwrap_or(f64::INFINITY)
    }
}

pub fn esd(op: &DirichletOperator) -> Result<Esd> {
    Ok(Esd::from_eigenvalues(&spectrum(op)?.eigenvalues))
}

/// `N(λ) = arccos(1 - λ)/π`, the spectral distribution of SRW on `Z`.
pub fn arcsine_limit(lambda: f64) -> f64 {
    (1.0 - lambda.clamp(0.0, 2.0)).acos() / std::f64::consts::PI
}

/// Removes the leading boundary term from two finite-volume ESDs, assuming
/// `N_Ω(λ) ≈ N(λ) - a(λ)·ρ(Ω)` with `ρ = |∂Ω|/|Ω|`.
pub fn boundary_extrapolate(small: (&Esd, f64), large: (&Esd, f64), lambda: f64) -> f64 {
    let ((n1, r1), (n2, r2)) = ((small.0.value(lambda), small.1), (large.0.value(lambda), large.1));
    (r1 * n2 - r2 * n1) / (r1 - r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupElement, GroupSpec};
    use crate::walk::Measure;
    use std::f64::consts::PI;

    fn z_esd(n: usize) -> Esd {
        let z = GroupSpec::free_abelian(1);
        let m = Measure::srw(&z, &z.canonical_generators()).unwrap();
        let omega: Vec<_> = (0..n as i64).map(|i| GroupElement::vector(&[i])).collect();
        esd(&DirichletOperator::new(&m, &omega).unwrap()).unwrap()
    }

    #[test]
    fn singleton_jump_at_one() {
        let e = z_esd(1);
        assert_eq!(e.value(0.999), 0.0);
        assert_eq!(e.value(1.0), 1.0);
    }

    #[test]
    fn interval_jumps_closed_form() {
        let n = 40;
        let e = z_esd(n);
        assert_eq!(e.step.points.len(), n);
        for (k, p) in e.step.points.iter().enumerate() {
            assert!((p - (1.0 - ((k + 1) as f64 * PI / (n + 1) as f64).cos())).abs() < 1e-12);
        }
        assert_eq!(e.value(2.0), 1.0);
        assert_eq!(e.value(-1e-15), 0.0);
    }

    #[test]
    fn arcsine_pointwise() {
        for n in [200usize, 800] {
            let e = z_esd(n);
            for l in [0.2, 0.5, 1.0] {
                assert!((e.value(l) - arcsine_limit(l)).abs() <= 2.0 / n as f64);
            }
        }
    }
}
