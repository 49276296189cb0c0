//! Comparison of the spectral distributions of two admissible measures on the
//! same finite sets.

use rayon::prelude::*;
use serde::Serialize;

use super::dirichlet::DirichletOperator;
use super::esd::{esd, Esd};
use crate::asymptotics::{simeq, ComparisonReport, Regime};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::walk::Measure;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityLevel {
    pub size: usize,
    pub report: ComparisonReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub group: String,
    pub window: (f64, f64),
    /// One comparison per set of the family, in the given order.
    pub levels: Vec<StabilityLevel>,
}

impl StabilityReport {
    /// The comparison on the last (largest) set.
    pub fn last(&self) -> &ComparisonReport {
        &self.levels.last().expect("nonempty family").report
    }
}

/// Dilatational `ESD₁ ≃ ESD₂` near zero on `window`, one comparison per set of
/// `family`. A missing witness is reported, not raised.
pub fn compare_measures(
    m1: &Measure,
    m2: &Measure,
    family: &[Vec<GroupElement>],
    window: (f64, f64),
) -> Result<StabilityReport> {
    if m1.spec != m2.spec {
        return Err(Error::Precondition("measures live on different groups".into()));
    }
    if family.is_empty() {
        return Err(Error::Precondition("empty set family".into()));
    }
    let levels = family
        .par_iter()
        .map(|omega| {
            let e1 = esd(&DirichletOperator::new(m1, omega)?)?;
            let e2 = esd(&DirichletOperator::new(m2, omega)?)?;
            Ok(StabilityLevel {
                size: omega.len(),
                report: compare_esds(&e1, &e2, window)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport {
        group: m1.spec.name(),
        window,
        levels,
    })
}

pub fn compare_esds(e1: &Esd, e2: &Esd, window: (f64, f64)) -> Result<ComparisonReport> {
    simeq(&|l| e1.value(l), &|l| e2.value(l), Regime::NearZero, window, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use num_rational::BigRational;

    fn intervals(sizes: &[i64]) -> Vec<Vec<GroupElement>> {
        sizes.iter().map(|&n| (0..n).map(|i| GroupElement::vector(&[i])).collect()).collect()
    }

    #[test]
    fn same_measure_unit_dilatation() {
        let z = GroupSpec::free_abelian(1);
        let m = Measure::srw(&z, &z.canonical_generators()).unwrap();
        let r = compare_measures(&m, &m, &intervals(&[200]), (1e-3, 1e-1)).unwrap();
        let rep = r.last();
        assert!(rep.holds);
        assert_eq!((rep.forward.unwrap().d, rep.backward.unwrap().d), (1.0, 1.0));
    }

    #[test]
    fn lazy_walk_is_a_pure_dilatation() {
        // on the same set, the lazy Laplacian is exactly half the simple one
        let z2 = GroupSpec::free_abelian(2);
        let gens = z2.canonical_generators();
        let srw = Measure::srw(&z2, &gens).unwrap();
        let lazy = Measure::lazy(&z2, &gens, BigRational::new(1.into(), 2.into())).unwrap();
        let omega: Vec<_> = (0..20).flat_map(|a| (0..20).map(move |b| GroupElement::vector(&[a, b]))).collect();
        let r = compare_measures(&srw, &lazy, &[omega], (1e-2, 1e-1)).unwrap();
        let rep = r.last();
        assert!(rep.holds, "{rep:?}");
        assert!(rep.forward.unwrap().d <= 1.0 && rep.backward.unwrap().d >= 2.0 - 1e-9);
    }

    #[test]
    fn different_groups_rejected() {
        let z = GroupSpec::free_abelian(1);
        let z2 = GroupSpec::free_abelian(2);
        let m1 = Measure::srw(&z, &z.canonical_generators()).unwrap();
        let m2 = Measure::srw(&z2, &z2.canonical_generators()).unwrap();
        assert!(compare_measures(&m1, &m2, &intervals(&[3]), (1e-2, 1e-1)).is_err());
    }
}
