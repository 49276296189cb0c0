//! Concrete groups with coordinate normal forms.

mod ball;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ball::{Ball, NONE};

/// Lamp group of a wreath product: finite cyclic or the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LampSpec {
    Cyclic { order: u32 },
    /// Only `d = 1` is accepted.
    FreeAbelian { d: usize },
}

impl LampSpec {
    /// Modulus for lamp values, `None` for Z.
    pub fn modulus(&self) -> Option<i64> {
        match *self {
            LampSpec::Cyclic { order } => Some(order as i64),
            LampSpec::FreeAbelian { .. } => None,
        }
    }
}

/// A group family together with its canonical generating set.
///
/// JSON form, e.g. `{"family":"free_abelian","d":2}`,
/// `{"family":"heisenberg"}`,
/// `{"family":"wreath","lamp":{"family":"cyclic","order":2},"base_rank":1}`,
/// `{"family":"iterated_wreath","depth":2,"lamp_order":2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GroupSpec {
    FreeAbelian { d: usize },
    Heisenberg,
    /// `lamp ≀ Z^base_rank`.
    Wreath { lamp: LampSpec, base_rank: usize },
    /// `Z_q ≀ Z` for depth 1, `Z_q ≀ (Z_q ≀ Z)` for depth 2.
    IteratedWreath { depth: usize, lamp_order: u32 },
}

/// Lamp configuration plus cursor. Lamps never store the identity value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathElement {
    pub lamps: BTreeMap<GroupElement, i64>,
    pub cursor: GroupElement,
}

/// Normal form of a group element. Structural equality is group equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Vector(Vec<i64>),
    /// Upper unitriangular coordinates `[[1,a,c],[0,1,b],[0,0,1]]`.
    Heisenberg([i64; 3]),
    Wreath(Box<WreathElement>),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Vector(v) => write!(f, "{v:?}"),
            GroupElement::Heisenberg(h) => write!(f, "({},{},{})", h[0], h[1], h[2]),
            GroupElement::Wreath(w) => {
                write!(f, "[")?;
                for (i, (k, v)) in w.lamps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}:{v}")?;
                }
                write!(f, "|{}]", w.cursor)
            }
        }
    }
}

impl GroupElement {
    pub fn vector(v: &[i64]) -> Self {
        GroupElement::Vector(v.to_vec())
    }

    pub fn wreath(lamps: impl IntoIterator<Item = (GroupElement, i64)>, cursor: GroupElement) -> Self {
        GroupElement::Wreath(Box::new(WreathElement {
            lamps: lamps.into_iter().filter(|(_, v)| *v != 0).collect(),
            cursor,
        }))
    }

    pub fn as_vector(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Vector(v) => Some(v),
            _ => None,
        }
    }
}

impl GroupSpec {
    pub fn free_abelian(d: usize) -> Self {
        GroupSpec::FreeAbelian { d }
    }

    /// `Z_q ≀ Z^d`.
    pub fn lamplighter(q: u32, d: usize) -> Self {
        GroupSpec::Wreath {
            lamp: LampSpec::Cyclic { order: q },
            base_rank: d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupSpec::FreeAbelian { d } if d == 0 => {
                Err(Error::Precondition("free abelian rank must be >= 1".into()))
            }
            GroupSpec::Wreath { base_rank, .. } if base_rank == 0 => {
                Err(Error::Precondition("wreath base rank must be >= 1".into()))
            }
            GroupSpec::Wreath {
                lamp: LampSpec::Cyclic { order },
                ..
            } if order < 2 => Err(Error::Precondition("cyclic lamp order must be >= 2".into())),
            GroupSpec::Wreath {
                lamp: LampSpec::FreeAbelian { d },
                ..
            } if d != 1 => Err(Error::Precondition(
                "lamp group must be finite cyclic or Z".into(),
            )),
            GroupSpec::IteratedWreath { depth, lamp_order } => {
                if !(1..=2).contains(&depth) {
                    Err(Error::Unsupported(format!("iterated wreath depth {depth} (max 2)")))
                } else if lamp_order < 2 {
                    Err(Error::Precondition("cyclic lamp order must be >= 2".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Short human-readable name used in output metadata.
    pub fn name(&self) -> String {
        match self {
            GroupSpec::FreeAbelian { d } => format!("Z^{d}"),
            GroupSpec::Heisenberg => "H3(Z)".into(),
            GroupSpec::Wreath { lamp, base_rank } => match lamp {
                LampSpec::Cyclic { order } => format!("Z{order} wr Z^{base_rank}"),
                LampSpec::FreeAbelian { .. } => format!("Z wr Z^{base_rank}"),
            },
            GroupSpec::IteratedWreath { depth, lamp_order } => {
                let mut s = "Z".to_string();
                for _ in 0..*depth {
                    s = format!("Z{lamp_order} wr ({s})");
                }
                s
            }
        }
    }

    /// Base group and lamp modulus when this is a wreath-type family.
    pub fn wreath_parts(&self) -> Option<(GroupSpec, Option<i64>)> {
        match *self {
            GroupSpec::Wreath { lamp, base_rank } => {
                Some((GroupSpec::FreeAbelian { d: base_rank }, lamp.modulus()))
            }
            GroupSpec::IteratedWreath { depth, lamp_order } => {
                let base = if depth <= 1 {
                    GroupSpec::FreeAbelian { d: 1 }
                } else {
                    GroupSpec::IteratedWreath {
                        depth: depth - 1,
                        lamp_order,
                    }
                };
                Some((base, Some(lamp_order as i64)))
            }
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::FreeAbelian { d } => GroupElement::Vector(vec![0; *d]),
            GroupSpec::Heisenberg => GroupElement::Heisenberg([0; 3]),
            _ => {
                let (base, _) = self.wreath_parts().expect("wreath family");
                GroupElement::wreath([], base.identity())
            }
        }
    }

    /// Checks that `g` has the shape and normalization this family expects.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        let bad = || Err(Error::Structural(format!("{} for {}", g, self.name())));
        match (self, g) {
            (GroupSpec::FreeAbelian { d }, GroupElement::Vector(v)) if v.len() == *d => Ok(()),
            (GroupSpec::Heisenberg, GroupElement::Heisenberg(_)) => Ok(()),
            (_, GroupElement::Wreath(w)) => {
                let Some((base, modulus)) = self.wreath_parts() else {
                    return bad();
                };
                base.check(&w.cursor)?;
                for (k, &v) in &w.lamps {
                    base.check(k)?;
                    let ok = match modulus {
                        Some(q) => v > 0 && v < q,
                        None => v != 0,
                    };
                    if !ok {
                        return bad();
                    }
                }
                Ok(())
            }
            _ => bad(),
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        match (self, g, h) {
            (GroupSpec::FreeAbelian { d }, GroupElement::Vector(a), GroupElement::Vector(b))
                if a.len() == *d && b.len() == *d =>
            {
                Ok(GroupElement::Vector(
                    a.iter().zip(b).map(|(x, y)| x + y).collect(),
                ))
            }
            (GroupSpec::Heisenberg, GroupElement::Heisenberg(x), GroupElement::Heisenberg(y)) => {
                Ok(GroupElement::Heisenberg([
                    x[0] + y[0],
                    x[1] + y[1],
                    x[2] + y[2] + x[0] * y[1],
                ]))
            }
            (_, GroupElement::Wreath(x), GroupElement::Wreath(y)) => {
                let (base, modulus) = self
                    .wreath_parts()
                    .ok_or_else(|| Error::Structural(format!("wreath element for {}", self.name())))?;
                // (f, p)(g, q) = (f + p.g, pq) with (p.g)(z) = g(p^-1 z)
                let mut lamps = x.lamps.clone();
                for (k, &v) in &y.lamps {
                    let key = base.multiply(&x.cursor, k)?;
                    add_lamp(&mut lamps, key, v, modulus);
                }
                let cursor = base.multiply(&x.cursor, &y.cursor)?;
                Ok(GroupElement::Wreath(Box::new(WreathElement { lamps, cursor })))
            }
            _ => Err(Error::Structural(format!(
                "{g} * {h} in {}",
                self.name()
            ))),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        match (self, g) {
            (GroupSpec::FreeAbelian { d }, GroupElement::Vector(a)) if a.len() == *d => {
                Ok(GroupElement::Vector(a.iter().map(|x| -x).collect()))
            }
            (GroupSpec::Heisenberg, GroupElement::Heisenberg(x)) => {
                Ok(GroupElement::Heisenberg([-x[0], -x[1], -x[2] + x[0] * x[1]]))
            }
            (_, GroupElement::Wreath(x)) => {
                let (base, modulus) = self
                    .wreath_parts()
                    .ok_or_else(|| Error::Structural(format!("wreath element for {}", self.name())))?;
                // (f, p)^-1 = (-(p^-1 . f), p^-1)
                let pinv = base.inverse(&x.cursor)?;
                let mut lamps = BTreeMap::new();
                for (k, &v) in &x.lamps {
                    add_lamp(&mut lamps, base.multiply(&pinv, k)?, -v, modulus);
                }
                Ok(GroupElement::Wreath(Box::new(WreathElement {
                    lamps,
                    cursor: pinv,
                })))
            }
            _ => Err(Error::Structural(format!("{g} in {}", self.name()))),
        }
    }

    /// Multiplies a word of elements left to right.
    pub fn product<'a>(&self, word: impl IntoIterator<Item = &'a GroupElement>) -> Result<GroupElement> {
        let mut acc = self.identity();
        for w in word {
            acc = self.multiply(&acc, w)?;
        }
        Ok(acc)
    }

    /// Canonical symmetric generating set of the family.
    ///
    /// * `Z^d`: `e_1, -e_1, ..., e_d, -e_d`.
    /// * Heisenberg: `x, x^-1, y, y^-1` with `x = (1,0,0)`, `y = (0,1,0)`.
    /// * wreath: lamp generators at the cursor (one flip for `Z_2`, `±1`
    ///   otherwise) followed by the base generators acting on the cursor.
    pub fn canonical_generators(&self) -> GeneratingSet {
        let elements = match self {
            GroupSpec::FreeAbelian { d } => (0..*d)
                .flat_map(|i| {
                    [1i64, -1].into_iter().map(move |s| {
                        let mut v = vec![0; *d];
                        v[i] = s;
                        GroupElement::Vector(v)
                    })
                })
                .collect(),
            GroupSpec::Heisenberg => vec![
                GroupElement::Heisenberg([1, 0, 0]),
                GroupElement::Heisenberg([-1, 0, 0]),
                GroupElement::Heisenberg([0, 1, 0]),
                GroupElement::Heisenberg([0, -1, 0]),
            ],
            _ => {
                let (base, modulus) = self.wreath_parts().expect("wreath family");
                let e = base.identity();
                let mut out = vec![GroupElement::wreath([(e.clone(), 1)], e.clone())];
                match modulus {
                    Some(2) => {}
                    Some(q) => out.push(GroupElement::wreath([(e.clone(), q - 1)], e.clone())),
                    None => out.push(GroupElement::wreath([(e.clone(), -1)], e.clone())),
                }
                for s in base.canonical_generators().elements {
                    out.push(GroupElement::wreath([], s));
                }
                out
            }
        };
        GeneratingSet::new(self, elements).expect("canonical generators are symmetric")
    }

    /// Word length of `g` with respect to `gens`, searched up to `max_len`.
    pub fn word_length(&self, gens: &GeneratingSet, g: &GroupElement, max_len: usize) -> Result<Option<usize>> {
        let e = self.identity();
        if *g == e {
            return Ok(Some(0));
        }
        let mut seen: HashSet<GroupElement> = HashSet::from([e.clone()]);
        let mut frontier = vec![e];
        for len in 1..=max_len {
            let mut next = Vec::new();
            for x in &frontier {
                for s in &gens.elements {
                    let y = self.multiply(x, s)?;
                    if y == *g {
                        return Ok(Some(len));
                    }
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        Ok(None)
    }
}

fn add_lamp(lamps: &mut BTreeMap<GroupElement, i64>, key: GroupElement, v: i64, modulus: Option<i64>) {
    let cur = lamps.get(&key).copied().unwrap_or(0);
    let mut nv = cur + v;
    if let Some(q) = modulus {
        nv = nv.rem_euclid(q);
    }
    if nv == 0 {
        lamps.remove(&key);
    } else {
        lamps.insert(key, nv);
    }
}

/// A finite symmetric generating set, with `inverse_index[i]` the position
/// of `elements[i]^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    pub elements: Vec<GroupElement>,
    pub inverse_index: Vec<usize>,
}

impl GeneratingSet {
    /// Rejects sets containing the identity, duplicates, or lacking inverses.
    pub fn new(spec: &GroupSpec, elements: Vec<GroupElement>) -> Result<Self> {
        let e = spec.identity();
        let mut inverse_index = Vec::with_capacity(elements.len());
        for (i, s) in elements.iter().enumerate() {
            spec.check(s)?;
            if *s == e {
                return Err(Error::Precondition("identity is not allowed as a generator".into()));
            }
            if elements[..i].contains(s) {
                return Err(Error::Precondition(format!("duplicate generator {s}")));
            }
            let inv = spec.inverse(s)?;
            match elements.iter().position(|t| *t == inv) {
                Some(j) => inverse_index.push(j),
                None => {
                    return Err(Error::Precondition(format!(
                        "generating set not symmetric: {s} present, {inv} missing"
                    )))
                }
            }
        }
        if elements.is_empty() {
            return Err(Error::Precondition("empty generating set".into()));
        }
        Ok(GeneratingSet {
            elements,
            inverse_index,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `∂_S Ω = {x ∈ Ω : x s ∉ Ω for some s ∈ S}`, in the order of `omega`.
pub fn boundary(spec: &GroupSpec, gens: &GeneratingSet, omega: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let set: HashSet<&GroupElement> = omega.iter().collect();
    let mut out = Vec::new();
    for x in omega {
        for s in &gens.elements {
            if !set.contains(&spec.multiply(x, s)?) {
                out.push(x.clone());
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(a: i64, b: i64, c: i64) -> GroupElement {
        GroupElement::Heisenberg([a, b, c])
    }

    fn mat(g: &GroupElement) -> [[i64; 3]; 3] {
        let GroupElement::Heisenberg([a, b, c]) = *g else { panic!() };
        [[1, a, c], [0, 1, b], [0, 0, 1]]
    }

    fn matmul(x: [[i64; 3]; 3], y: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut z = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                z[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum();
            }
        }
        z
    }

    #[test]
    fn identities() {
        assert_eq!(GroupSpec::free_abelian(2).identity(), GroupElement::vector(&[0, 0]));
        assert_eq!(GroupSpec::Heisenberg.identity(), h(0, 0, 0));
        let w = GroupSpec::lamplighter(2, 1).identity();
        assert_eq!(w, GroupElement::wreath([], GroupElement::vector(&[0])));
    }

    #[test]
    fn heisenberg_matches_matrices() {
        let g = GroupSpec::Heisenberg;
        let x = h(1, 0, 0);
        let y = h(0, 1, 0);
        let xy = g.multiply(&x, &y).unwrap();
        let yx = g.multiply(&y, &x).unwrap();
        assert_eq!(g.multiply(&xy, &g.inverse(&yx).unwrap()).unwrap(), h(0, 0, 1));
        for (p, q) in [(h(2, -1, 3), h(-4, 5, 7)), (h(1, 1, 0), h(0, 3, -2))] {
            assert_eq!(mat(&g.multiply(&p, &q).unwrap()), matmul(mat(&p), mat(&q)));
        }
        let v = g.inverse(&h(1, 1, 0)).unwrap();
        assert_eq!(g.multiply(&h(1, 1, 0), &v).unwrap(), h(0, 0, 0));
        assert_eq!(mat(&v), [[1, -1, 1], [0, 1, -1], [0, 0, 1]]);
    }

    #[test]
    fn lamplighter_law() {
        let g = GroupSpec::lamplighter(2, 1);
        let z = |k: i64| GroupElement::vector(&[k]);
        let a = GroupElement::wreath([(z(0), 1)], z(0));
        let t = GroupElement::wreath([], z(1));
        assert_eq!(g.multiply(&a, &t).unwrap(), GroupElement::wreath([(z(0), 1)], z(1)));
        let at = GroupElement::wreath([(z(0), 1)], z(1));
        assert_eq!(g.inverse(&at).unwrap(), GroupElement::wreath([(z(-1), 1)], z(-1)));
        assert_eq!(g.multiply(&a, &a).unwrap(), g.identity());
        assert_eq!(g.canonical_generators().len(), 3);
    }

    #[test]
    fn free_abelian_inverse() {
        let g = GroupSpec::free_abelian(1);
        assert_eq!(g.inverse(&GroupElement::vector(&[5])).unwrap(), GroupElement::vector(&[-5]));
        assert_eq!(
            GroupSpec::free_abelian(2)
                .multiply(&GroupElement::vector(&[1, 0]), &GroupElement::vector(&[0, 1]))
                .unwrap(),
            GroupElement::vector(&[1, 1])
        );
    }

    #[test]
    fn shape_mismatch_is_structural() {
        let g = GroupSpec::free_abelian(2);
        let r = g.multiply(&GroupElement::vector(&[1]), &GroupElement::vector(&[1, 2]));
        assert!(matches!(r, Err(Error::Structural(_))));
        assert!(GroupSpec::Heisenberg.multiply(&h(0, 0, 0), &GroupElement::vector(&[1])).is_err());
    }

    #[test]
    fn boundary_examples() {
        let g = GroupSpec::free_abelian(1);
        let s = g.canonical_generators();
        let omega: Vec<_> = (0..10).map(|k| GroupElement::vector(&[k])).collect();
        assert_eq!(
            boundary(&g, &s, &omega).unwrap(),
            vec![GroupElement::vector(&[0]), GroupElement::vector(&[9])]
        );
        let one = vec![GroupElement::vector(&[0])];
        assert_eq!(boundary(&g, &s, &one).unwrap(), one);
        let g2 = GroupSpec::free_abelian(2);
        let boxed: Vec<_> = (0..3)
            .flat_map(|i| (0..3).map(move |j| GroupElement::vector(&[i, j])))
            .collect();
        let b = boundary(&g2, &g2.canonical_generators(), &boxed).unwrap();
        assert_eq!(b.len(), 8);
        assert!(!b.contains(&GroupElement::vector(&[1, 1])));
    }

    #[test]
    fn asymmetric_set_rejected() {
        let g = GroupSpec::free_abelian(1);
        let r = GeneratingSet::new(&g, vec![GroupElement::vector(&[1])]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn json_schema_forms() {
        let specs = [
            (GroupSpec::free_abelian(2), r#"{"family":"free_abelian","d":2}"#),
            (GroupSpec::Heisenberg, r#"{"family":"heisenberg"}"#),
            (
                GroupSpec::lamplighter(2, 1),
                r#"{"family":"wreath","lamp":{"family":"cyclic","order":2},"base_rank":1}"#,
            ),
            (
                GroupSpec::IteratedWreath { depth: 2, lamp_order: 2 },
                r#"{"family":"iterated_wreath","depth":2,"lamp_order":2}"#,
            ),
        ];
        for (spec, json) in specs {
            assert_eq!(serde_json::to_string(&spec).unwrap(), json);
            assert_eq!(serde_json::from_str::<GroupSpec>(json).unwrap(), spec);
        }
    }

    #[test]
    fn iterated_depth_capped() {
        let g = GroupSpec::IteratedWreath { depth: 3, lamp_order: 2 };
        assert!(matches!(g.validate(), Err(Error::Unsupported(_))));
    }
}
