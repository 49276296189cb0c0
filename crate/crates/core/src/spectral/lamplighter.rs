//! Spectrum of the simple random walk on `Z_2 ≀ Z` restricted to the box
//! `{lamps ⊆ [0, L), cursor ∈ [0, L)}`.
//!
//! Fourier transform in the lamp coordinates splits the operator into `2^L`
//! blocks indexed by `ε ∈ {±1}^L`, each `I - (T + diag ε)/3` with `T` the
//! adjacency matrix of the path on `L` vertices.

use rayon::prelude::*;

use super::eigen::tridiagonal_eigenvalues;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

/// Box side beyond which the `L · 2^L` spectrum is refused.
pub const MAX_SIDE: usize = 22;

/// Ascending Dirichlet eigenvalues on the box of side `len`.
pub fn box_eigenvalues(len: usize) -> Result<Vec<f64>> {
    if len == 0 {
        return Err(Error::Precondition("box side must be positive".into()));
    }
    if len > MAX_SIDE {
        return Err(Error::Resource {
            what: "lamplighter box spectrum".into(),
            limit: MAX_SIDE,
            reached: len,
        });
    }
    let off = vec![-1.0 / 3.0; len - 1];
    let blocks: Vec<Vec<f64>> = (0..1usize << len)
        .into_par_iter()
        .map(|mask| {
            let diag: Vec<f64> = (0..len)
                .map(|x| if mask >> x & 1 == 1 { 1.0 + 1.0 / 3.0 } else { 1.0 - 1.0 / 3.0 })
                .collect();
            tridiagonal_eigenvalues(&diag, &off)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<f64> = blocks.into_iter().flatten().collect();
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// `λ₁` of the box: the block `ε ≡ 1`, `1 - (1 + 2cos(π/(L+1)))/3`.
pub fn box_lambda1(len: usize) -> f64 {
    1.0 - (1.0 + 2.0 * (std::f64::consts::PI / (len + 1) as f64).cos()) / 3.0
}

/// Elements of the box, for cross-checks against the generic operator.
pub fn box_elements(len: usize) -> Vec<GroupElement> {
    let mut out = Vec::with_capacity(len << len);
    for mask in 0..1usize << len {
        let lamps: Vec<(GroupElement, i64)> = (0..len)
            .filter(|x| mask >> x & 1 == 1)
            .map(|x| (GroupElement::vector(&[x as i64]), 1))
            .collect();
        for c in 0..len as i64 {
            out.push(GroupElement::wreath(lamps.clone(), GroupElement::vector(&[c])));
        }
    }
    out
}

/// True for the group this module handles.
pub fn applies_to(spec: &GroupSpec) -> bool {
    *spec == GroupSpec::lamplighter(2, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dirichlet::{spectrum, DirichletOperator};
    use crate::walk::Measure;

    #[test]
    fn fibers_match_dense_operator() {
        let g = GroupSpec::lamplighter(2, 1);
        let m = Measure::srw(&g, &g.canonical_generators()).unwrap();
        for len in 1..=5 {
            let op = DirichletOperator::new(&m, &box_elements(len)).unwrap();
            let dense = spectrum(&op).unwrap().eigenvalues;
            let fiber = box_eigenvalues(len).unwrap();
            assert_eq!(dense.len(), fiber.len());
            for (a, b) in dense.iter().zip(&fiber) {
                assert!((a - b).abs() < 1e-12, "L={len}");
            }
            assert!((fiber[0] - box_lambda1(len)).abs() < 1e-14);
        }
    }
}
