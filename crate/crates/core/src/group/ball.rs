use std::collections::HashMap;

use super::{GeneratingSet, GroupElement, GroupSpec};
use crate::error::{Error, Result};

/// Adjacency sentinel for `x·s` outside the ball.
pub const NONE: u32 = u32::MAX;

/// Metric ball `B(r)` in BFS order (layer, then normal-form order).
#[derive(Clone, Debug)]
pub struct Ball {
    pub spec: GroupSpec,
    pub generators: GeneratingSet,
    pub radius: usize,
    pub elements: Vec<GroupElement>,
    pub index: HashMap<GroupElement, u32>,
    /// `layer_starts[k]` is the first index of layer `k`; one extra entry
    /// closes the last layer.
    pub layer_starts: Vec<usize>,
    /// Row-major `|B| × |S|` table of `index(x·s)` or [`NONE`].
    pub adjacency: Vec<u32>,
}

impl Ball {
    /// Fails with a resource error when more than `cap` elements are needed.
    pub fn new(spec: &GroupSpec, gens: &GeneratingSet, radius: usize, cap: usize) -> Result<Ball> {
        let ball = Self::within_cap(spec, gens, radius, cap)?;
        if ball.radius < radius {
            return Err(Error::Resource {
                what: format!("ball of radius {radius} in {} (complete up to layer {})", spec.name(), ball.radius),
                limit: cap,
                reached: ball.radius,
            });
        }
        Ok(ball)
    }

    /// Largest ball `B(r')`, `r' ≤ radius`, whose size stays within `cap`.
    pub fn within_cap(spec: &GroupSpec, gens: &GeneratingSet, radius: usize, cap: usize) -> Result<Ball> {
        spec.validate()?;
        let e = spec.identity();
        let mut elements = vec![e.clone()];
        let mut index = HashMap::from([(e, 0u32)]);
        let mut layer_starts = vec![0usize, 1];
        let ns = gens.len();
        let mut adjacency: Vec<u32> = Vec::new();
        let mut reached = 0;
        // products of the current outermost layer, kept until the next layer is indexed
        let mut pending: Vec<GroupElement> = Vec::new();
        for r in 0..=radius {
            let (lo, hi) = (layer_starts[r], layer_starts[r + 1]);
            pending.clear();
            pending.reserve((hi - lo) * ns);
            for x in &elements[lo..hi] {
                for s in &gens.elements {
                    pending.push(spec.multiply(x, s)?);
                }
            }
            if r == radius {
                break;
            }
            let mut fresh: Vec<GroupElement> =
                pending.iter().filter(|y| !index.contains_key(*y)).cloned().collect();
            fresh.sort_unstable();
            fresh.dedup();
            if elements.len() + fresh.len() > cap {
                break;
            }
            for y in fresh {
                index.insert(y.clone(), elements.len() as u32);
                elements.push(y);
            }
            layer_starts.push(elements.len());
            adjacency.extend(pending.iter().map(|y| index[y]));
            reached = r + 1;
        }
        // outermost layer: products may leave the ball
        let (lo, hi) = (layer_starts[reached], layer_starts[reached + 1]);
        if pending.len() != (hi - lo) * ns {
            pending.clear();
            for x in &elements[lo..hi] {
                for s in &gens.elements {
                    pending.push(spec.multiply(x, s)?);
                }
            }
        }
        adjacency.extend(pending.iter().map(|y| index.get(y).copied().unwrap_or(NONE)));
        layer_starts.truncate(reached + 2);
        Ok(Ball {
            spec: spec.clone(),
            generators: gens.clone(),
            radius: reached,
            elements,
            index,
            layer_starts,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `|B(k)|` for `k ≤ radius`.
    pub fn size_at(&self, k: usize) -> usize {
        self.layer_starts[k.min(self.radius) + 1]
    }

    pub fn neighbor(&self, i: usize, s: usize) -> u32 {
        self.adjacency[i * self.generators.len() + s]
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        let ns = self.generators.len();
        &self.adjacency[i * ns..(i + 1) * ns]
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn words_oracle(spec: &GroupSpec, gens: &GeneratingSet, r: usize) -> BTreeSet<GroupElement> {
        let mut out = BTreeSet::from([spec.identity()]);
        let mut words = vec![spec.identity()];
        for _ in 0..r {
            let mut next = Vec::new();
            for w in &words {
                for s in &gens.elements {
                    next.push(spec.multiply(w, s).unwrap());
                }
            }
            out.extend(next.iter().cloned());
            words = next;
        }
        out
    }

    #[test]
    fn z2_ball_sizes() {
        let g = GroupSpec::free_abelian(2);
        let s = g.canonical_generators();
        assert_eq!(Ball::new(&g, &s, 1, 1000).unwrap().len(), 5);
        let b = Ball::new(&g, &s, 10, 1000).unwrap();
        assert_eq!(b.len(), 221);
        for r in 0..=10 {
            assert_eq!(b.size_at(r), 2 * r * r + 2 * r + 1);
        }
    }

    #[test]
    fn heisenberg_matches_word_enumeration() {
        let g = GroupSpec::Heisenberg;
        let s = g.canonical_generators();
        for r in 0..=4 {
            let b = Ball::new(&g, &s, r, 100_000).unwrap();
            let oracle = words_oracle(&g, &s, r);
            let got: BTreeSet<_> = b.elements.iter().cloned().collect();
            assert_eq!(got, oracle, "radius {r}");
        }
    }

    #[test]
    fn layers_are_prefixes_and_adjacency_involutive() {
        for g in [GroupSpec::Heisenberg, GroupSpec::lamplighter(2, 1), GroupSpec::free_abelian(3)] {
            let s = g.canonical_generators();
            let small = Ball::new(&g, &s, 3, 1 << 20).unwrap();
            let big = Ball::new(&g, &s, 4, 1 << 20).unwrap();
            assert_eq!(&big.elements[..small.len()], &small.elements[..]);
            assert!(big.len() > small.len());
            assert_eq!(big.elements[0], g.identity());
            for i in 0..big.len() {
                for (k, &j) in big.neighbors(i).iter().enumerate() {
                    if j != NONE {
                        assert_eq!(big.neighbor(j as usize, s.inverse_index[k]) as usize, i);
                        let prod = g.multiply(&big.elements[i], &s.elements[k]).unwrap();
                        assert_eq!(big.elements[j as usize], prod);
                    }
                }
            }
        }
    }

    #[test]
    fn cap_reports_layer() {
        let g = GroupSpec::lamplighter(2, 1);
        let s = g.canonical_generators();
        match Ball::new(&g, &s, 30, 500) {
            Err(Error::Resource { reached, .. }) => assert!(reached > 3 && reached < 30),
            other => panic!("expected resource error, got {other:?}"),
        }
        let partial = Ball::within_cap(&g, &s, 30, 500).unwrap();
        assert!(partial.len() <= 500);
    }
}
