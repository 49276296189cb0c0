use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{GeneratingSet, GroupElement, GroupSpec};

/// Finitely supported symmetric probability measure with exact weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub spec: GroupSpec,
    /// Sorted by element, strictly positive weights.
    pub support: Vec<(GroupElement, BigRational)>,
}

/// Upper bound on elements explored when certifying that a support generates.
const GENERATION_SEARCH_LIMIT: usize = 200_000;

impl Measure {
    /// Validates positivity, total mass 1, symmetry and generation.
    pub fn new(spec: &GroupSpec, weights: Vec<(GroupElement, BigRational)>) -> Result<Measure> {
        spec.validate()?;
        let mut merged: HashMap<GroupElement, BigRational> = HashMap::new();
        for (g, w) in weights {
            spec.check(&g)?;
            if !w.is_positive() {
                return Err(Error::Precondition(format!("weight of {g} must be positive, got {w}")));
            }
            *merged.entry(g).or_insert_with(BigRational::zero) += w;
        }
        let total: BigRational = merged.values().cloned().sum();
        if !total.is_one() {
            return Err(Error::Precondition(format!("weights sum to {total}, not 1")));
        }
        for (g, w) in &merged {
            let inv = spec.inverse(g)?;
            match merged.get(&inv) {
                Some(wi) if wi == w => {}
                other => {
                    return Err(Error::Precondition(format!(
                        "measure not symmetric: mu({g}) = {w} but mu({inv}) = {}",
                        other.map_or("0".to_string(), |x| x.to_string())
                    )))
                }
            }
        }
        let mut support: Vec<_> = merged.into_iter().collect();
        support.sort_by(|a, b| a.0.cmp(&b.0));
        let m = Measure {
            spec: spec.clone(),
            support,
        };
        m.certify_generating()?;
        Ok(m)
    }

    /// Uniform measure on a symmetric generating set.
    pub fn srw(spec: &GroupSpec, gens: &GeneratingSet) -> Result<Measure> {
        let w = BigRational::new(BigInt::one(), BigInt::from(gens.len()));
        Self::new(spec, gens.elements.iter().map(|g| (g.clone(), w.clone())).collect())
    }

    /// `holding` at the identity, the rest spread uniformly over `gens`.
    pub fn lazy(spec: &GroupSpec, gens: &GeneratingSet, holding: BigRational) -> Result<Measure> {
        if !(holding.is_positive() && holding < BigRational::one()) {
            return Err(Error::Precondition(format!("holding probability {holding} not in (0,1)")));
        }
        let w = (BigRational::one() - &holding) / BigRational::from_integer(BigInt::from(gens.len()));
        let mut weights = vec![(spec.identity(), holding)];
        weights.extend(gens.elements.iter().map(|g| (g.clone(), w.clone())));
        Self::new(spec, weights)
    }

    /// Uniform measure on a list of elements (must be symmetric).
    pub fn uniform(spec: &GroupSpec, elements: &[GroupElement]) -> Result<Measure> {
        if elements.is_empty() {
            return Err(Error::Precondition("empty support".into()));
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(elements.len()));
        Self::new(spec, elements.iter().map(|g| (g.clone(), w.clone())).collect())
    }

    pub fn weight(&self, g: &GroupElement) -> BigRational {
        self.support
            .binary_search_by(|(x, _)| x.cmp(g))
            .map(|i| self.support[i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn identity_weight(&self) -> BigRational {
        self.weight(&self.spec.identity())
    }

    /// Support without the identity, as a generating set.
    pub fn step_set(&self) -> Result<GeneratingSet> {
        let e = self.spec.identity();
        GeneratingSet::new(
            &self.spec,
            self.support.iter().filter(|(g, _)| *g != e).map(|(g, _)| g.clone()).collect(),
        )
    }

    /// Weights aligned with [`Measure::step_set`].
    pub fn step_weights(&self) -> Vec<BigRational> {
        let e = self.spec.identity();
        self.support.iter().filter(|(g, _)| *g != e).map(|(_, w)| w.clone()).collect()
    }

    pub fn to_f64(w: &BigRational) -> f64 {
        w.to_f64().unwrap_or(f64::NAN)
    }

    /// True when this is the uniform measure on the canonical generators.
    pub fn is_canonical_srw(&self) -> bool {
        let gens = self.spec.canonical_generators();
        self.support.len() == gens.len()
            && gens.elements.iter().all(|g| {
                self.weight(g) == BigRational::new(BigInt::one(), BigInt::from(gens.len()))
            })
    }

    /// Maximal word length of the support in the canonical generators.
    pub fn max_word_length(&self) -> Result<usize> {
        let gens = self.spec.canonical_generators();
        let mut best = 0;
        for (g, _) in &self.support {
            let len = self
                .spec
                .word_length(&gens, g, 16)?
                .ok_or_else(|| Error::Precondition(format!("support element {g} too long")))?;
            best = best.max(len);
        }
        Ok(best)
    }

    /// The subgroup generated by the support must contain every canonical
    /// generator; found by BFS over products of support elements.
    fn certify_generating(&self) -> Result<()> {
        let e = self.spec.identity();
        let steps: Vec<&GroupElement> = self.support.iter().map(|(g, _)| g).filter(|g| **g != e).collect();
        let mut missing: HashSet<GroupElement> = self.spec.canonical_generators().elements.into_iter().collect();
        let mut seen: HashSet<GroupElement> = HashSet::from([e.clone()]);
        let mut frontier = vec![e];
        while !missing.is_empty() && !frontier.is_empty() && seen.len() < GENERATION_SEARCH_LIMIT {
            let mut next = Vec::new();
            for x in &frontier {
                for s in &steps {
                    let y = self.spec.multiply(x, s)?;
                    if seen.insert(y.clone()) {
                        missing.remove(&y);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "support does not generate {} (e.g. {} unreachable)",
                self.spec.name(),
                missing.iter().min().expect("nonempty")
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn srw_weights() {
        let z = GroupSpec::free_abelian(1);
        let m = Measure::srw(&z, &z.canonical_generators()).unwrap();
        assert_eq!(m.weight(&GroupElement::vector(&[1])), q(1, 2));
        assert_eq!(m.weight(&GroupElement::vector(&[-1])), q(1, 2));
        let z2 = GroupSpec::free_abelian(2);
        let m2 = Measure::srw(&z2, &z2.canonical_generators()).unwrap();
        assert!(m2.support.iter().all(|(_, w)| *w == q(1, 4)));
        let l = GroupSpec::lamplighter(2, 1);
        let ml = Measure::srw(&l, &l.canonical_generators()).unwrap();
        assert_eq!(ml.support.len(), 3);
        assert!(ml.is_canonical_srw());
    }

    #[test]
    fn asymmetric_rejected_with_pair() {
        let z = GroupSpec::free_abelian(1);
        let r = Measure::new(
            &z,
            vec![(GroupElement::vector(&[1]), q(2, 3)), (GroupElement::vector(&[-1]), q(1, 3))],
        );
        match r {
            Err(Error::Precondition(msg)) => assert!(msg.contains("not symmetric")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_generating_rejected() {
        let z = GroupSpec::free_abelian(1);
        let r = Measure::uniform(&z, &[GroupElement::vector(&[2]), GroupElement::vector(&[-2])]);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let ok = Measure::uniform(
            &z,
            &[-2, -1, 1, 2].map(|k| GroupElement::vector(&[k])),
        )
        .unwrap();
        assert_eq!(ok.max_word_length().unwrap(), 2);
    }

    #[test]
    fn lazy_has_identity() {
        let z2 = GroupSpec::free_abelian(2);
        let m = Measure::lazy(&z2, &z2.canonical_generators(), q(1, 2)).unwrap();
        assert_eq!(m.identity_weight(), q(1, 2));
        assert_eq!(m.step_weights(), vec![q(1, 8); 4]);
    }
}
