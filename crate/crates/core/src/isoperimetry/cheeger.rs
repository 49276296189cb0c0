//! Combinatorial Cheeger inequality
//! `λ₁(Ω) ≥ (1/2|S|²)·(inf_{ω⊆Ω} |∂_S ω|/|ω|)²` for the simple random walk.

use std::collections::HashMap;

use serde::Serialize;

use super::profile::{measure_ball, subset_lambda1};
use super::subsets::connected_subsets;
use crate::error::{Error, Result};
use crate::group::{GeneratingSet, GroupElement, GroupSpec, NONE};
use crate::spectral::{lambda1, DirichletOperator};
use crate::walk::Measure;

/// Largest `|Ω|` for the exhaustive inner infimum.
pub const EXHAUSTIVE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheegerBound {
    pub size: usize,
    /// `inf |∂ω|/|ω|` over the searched `ω`.
    pub inf_ratio: f64,
    pub value: f64,
    pub lambda1: f64,
    /// False when `|Ω|` exceeded the exhaustive cap and only a heuristic
    /// family of `ω` was searched; then `value` is not a certified bound.
    pub exhaustive: bool,
    pub holds: bool,
}

/// `in_omega[i]` bitmask of the neighbours of element `i` inside `Ω`, and
/// whether some neighbour lies outside.
pub(crate) struct LocalGraph {
    pub nbr_mask: Vec<u32>,
    pub has_outside: Vec<bool>,
}

impl LocalGraph {
    /// `min_{∅≠ω⊆Ω} |∂ω|/|ω|` by enumerating all bitmasks.
    pub fn inf_ratio(&self) -> f64 {
        let n = self.nbr_mask.len();
        let mut best = f64::INFINITY;
        for w in 1u32..(1u32 << n) {
            let mut bd = 0u32;
            let mut bits = w;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if self.has_outside[i] || self.nbr_mask[i] & !w != 0 {
                    bd += 1;
                }
            }
            let r = bd as f64 / w.count_ones() as f64;
            if r < best {
                best = r;
            }
        }
        best
    }
}

fn cheeger_value(s: usize, inf_ratio: f64) -> f64 {
    inf_ratio * inf_ratio / (2.0 * (s * s) as f64)
}

/// Bound for an arbitrary finite `Ω`; `λ₁` is taken for the simple random
/// walk on `gens`.
pub fn cheeger_lower(spec: &GroupSpec, gens: &GeneratingSet, omega: &[GroupElement]) -> Result<CheegerBound> {
    if omega.is_empty() {
        return Err(Error::Precondition("Ω must be nonempty".into()));
    }
    let index: HashMap<&GroupElement, usize> = omega.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let n = omega.len();
    let mut nbrs: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
    for x in omega {
        let row = gens
            .elements
            .iter()
            .map(|s| spec.multiply(x, s).map(|y| index.get(&y).copied()))
            .collect::<Result<Vec<_>>>()?;
        nbrs.push(row);
    }
    let exhaustive = n <= EXHAUSTIVE_CAP;
    let inf_ratio = if exhaustive {
        LocalGraph {
            nbr_mask: nbrs.iter().map(|r| r.iter().flatten().fold(0u32, |m, &j| m | 1 << j)).collect(),
            has_outside: nbrs.iter().map(|r| r.iter().any(Option::is_none)).collect(),
        }
        .inf_ratio()
    } else {
        // heuristic: Ω itself and the graph balls of Ω around each point
        let mut best = f64::INFINITY;
        for start in 0..n {
            let mut member = vec![false; n];
            let mut layer = vec![start];
            member[start] = true;
            let mut size = 1usize;
            loop {
                let bd = (0..n)
                    .filter(|&i| member[i] && nbrs[i].iter().any(|j| j.is_none_or(|j| !member[j])))
                    .count();
                best = best.min(bd as f64 / size as f64);
                let mut next = Vec::new();
                for &i in &layer {
                    for &j in nbrs[i].iter().flatten() {
                        if !member[j] {
                            member[j] = true;
                            next.push(j);
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                size += next.len();
                layer = next;
            }
        }
        best
    };
    let m = Measure::srw(spec, gens)?;
    let l1 = lambda1(&DirichletOperator::new(&m, omega)?)?.0;
    let value = cheeger_value(gens.len(), inf_ratio);
    Ok(CheegerBound {
        size: n,
        inf_ratio,
        value,
        lambda1: l1,
        exhaustive,
        holds: l1 >= value - 1e-12,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheegerSweep {
    pub max_size: usize,
    pub sets: usize,
    pub violations: usize,
    /// `min (λ₁ - bound)` over all sets.
    pub min_margin: f64,
}

/// Checks the inequality on every connected `Ω ∋ e` with `|Ω| ≤ max_size`,
/// for the simple random walk on the canonical generators.
pub fn cheeger_sweep(spec: &GroupSpec, max_size: usize) -> Result<CheegerSweep> {
    if max_size == 0 || max_size > EXHAUSTIVE_CAP {
        return Err(Error::Precondition(format!("sweep size must be in 1..={EXHAUSTIVE_CAP}")));
    }
    let gens = spec.canonical_generators();
    let m = Measure::srw(spec, &gens)?;
    let (ball, weights, diagonal) = measure_ball(&m, max_size - 1)?;
    let s = ball.generators.len();
    let mut sweep = CheegerSweep {
        max_size,
        sets: 0,
        violations: 0,
        min_margin: f64::INFINITY,
    };
    let mut failure = None;
    connected_subsets(&ball, max_size, &mut |sub| {
        if failure.is_some() {
            return;
        }
        let local = LocalGraph {
            nbr_mask: sub
                .iter()
                .map(|&i| {
                    ball.neighbors(i as usize)
                        .iter()
                        .filter_map(|&j| sub.binary_search(&j).ok())
                        .fold(0u32, |m, k| m | 1 << k)
                })
                .collect(),
            has_outside: sub
                .iter()
                .map(|&i| {
                    ball.neighbors(i as usize)
                        .iter()
                        .any(|&j| j == NONE || sub.binary_search(&j).is_err())
                })
                .collect(),
        };
        let bound = cheeger_value(s, local.inf_ratio());
        match subset_lambda1(&ball, &weights, diagonal, sub) {
            Ok(l) => {
                sweep.sets += 1;
                let margin = l - bound;
                sweep.min_margin = sweep.min_margin.min(margin);
                if margin < -1e-12 {
                    sweep.violations += 1;
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(sweep),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(n: i64) -> Vec<GroupElement> {
        (0..n).map(|i| GroupElement::vector(&[i])).collect()
    }

    #[test]
    fn singleton() {
        let z = GroupSpec::free_abelian(1);
        let b = cheeger_lower(&z, &z.canonical_generators(), &interval(1)).unwrap();
        assert_eq!(b.inf_ratio, 1.0);
        assert_eq!(b.value, 1.0 / 8.0);
        assert!(b.holds && b.exhaustive);
    }

    #[test]
    fn interval_of_five() {
        let z = GroupSpec::free_abelian(1);
        let b = cheeger_lower(&z, &z.canonical_generators(), &interval(5)).unwrap();
        // best ω is Ω itself: 2/5
        assert!((b.inf_ratio - 0.4).abs() < 1e-15);
        assert!((b.lambda1 - (1.0 - (std::f64::consts::PI / 6.0).cos())).abs() < 1e-12);
        assert!(b.holds);
    }

    #[test]
    fn square_box() {
        let z2 = GroupSpec::free_abelian(2);
        let omega: Vec<_> = (0..3).flat_map(|a| (0..3).map(move |b| GroupElement::vector(&[a, b]))).collect();
        let b = cheeger_lower(&z2, &z2.canonical_generators(), &omega).unwrap();
        // the plus shape: only the centre is interior
        assert!((b.inf_ratio - 0.8).abs() < 1e-15);
        assert!(b.holds);
    }

    #[test]
    fn heuristic_flagged_for_large_sets() {
        let z = GroupSpec::free_abelian(1);
        let b = cheeger_lower(&z, &z.canonical_generators(), &interval(30)).unwrap();
        assert!(!b.exhaustive);
        assert!((b.inf_ratio - 2.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn small_sweeps() {
        let r = cheeger_sweep(&GroupSpec::free_abelian(1), 12).unwrap();
        assert_eq!((r.sets, r.violations), (78, 0));
        let r = cheeger_sweep(&GroupSpec::free_abelian(2), 6).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.sets, 1 + 4 + 18 + 76 + 315 + 1296);
    }
}
