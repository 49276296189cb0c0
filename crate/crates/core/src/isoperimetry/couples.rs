//! Følner couples `ω_n ⊆ Ω_n` with `d_S(ω_n, Γ∖Ω_n) > εn` and
//! `|Ω_n| ≤ C|ω_n|`, and the spectral-distribution templates built from
//! them and from Følner-type growth.
//!
//! Families (canonical generators, `ε = 1` throughout):
//!
//! * `Z^d`: `Ω_n = [-2n, 2n]^d ⊃ ω_n = [-n, n]^d`, `C = 2^d`.
//! * Heisenberg: `|a|,|b| ≤ 2n, |c| ≤ 3n²` around `|a|,|b| ≤ n, |c| ≤ n²`,
//!   `C = 12`. Each generator moves `c` by at most `|a|`, so `n` steps from
//!   `ω_n` stay inside `Ω_n`.
//! * `Z_q ≀ Z^d`: lamps free on `[-2n, 2n]^d` in both sets, cursor in
//!   `[-2n, 2n]^d` resp. `[-n, n]^d`, `C = 2^d`. Lamps off the box can only
//!   change after the cursor leaves it.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, LampSpec};
use crate::spectral::{lambda1, lamplighter, DirichletOperator};
use crate::transforms::Expr;
use crate::walk::Measure;

/// Largest `|Ω_n|` for which the distance is measured by BFS.
pub const DISTANCE_CAP: usize = 300_000;
/// Largest `|Ω_n|` for the generic eigensolver.
pub const SPECTRAL_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FolnerCouple {
    pub group: String,
    pub n: usize,
    pub outer_size: f64,
    pub inner_size: f64,
    /// `d_S(ω_n, Γ∖Ω_n)`.
    pub distance: usize,
    /// False when `distance` is the analytic value (set too large for BFS).
    pub distance_measured: bool,
    pub epsilon: f64,
    pub c_declared: f64,
    pub lambda1: f64,
    /// `n²·λ₁(Ω_n)`.
    pub alpha: f64,
}

/// Declared `(ε, C)` for the family.
pub fn couple_constants(spec: &GroupSpec) -> Result<(f64, f64)> {
    match *spec {
        GroupSpec::FreeAbelian { d } => Ok((1.0, 2f64.powi(d as i32))),
        GroupSpec::Heisenberg => Ok((1.0, 12.0)),
        GroupSpec::Wreath {
            lamp: LampSpec::Cyclic { .. },
            base_rank,
        } => Ok((1.0, 2f64.powi(base_rank as i32))),
        _ => Err(Error::Unsupported(format!("no Følner couples for {}", spec.name()))),
    }
}

/// `(|Ω_n|, |ω_n|)` by counting.
pub fn couple_sizes(spec: &GroupSpec, n: usize) -> Result<(f64, f64)> {
    let n = n as f64;
    match *spec {
        GroupSpec::FreeAbelian { d } => Ok(((4.0 * n + 1.0).powi(d as i32), (2.0 * n + 1.0).powi(d as i32))),
        GroupSpec::Heisenberg => Ok((
            (4.0 * n + 1.0).powi(2) * (6.0 * n * n + 1.0),
            (2.0 * n + 1.0).powi(2) * (2.0 * n * n + 1.0),
        )),
        GroupSpec::Wreath {
            lamp: LampSpec::Cyclic { order },
            base_rank,
        } => {
            let sites = (4.0 * n + 1.0).powi(base_rank as i32);
            let configs = (order as f64).powf(sites);
            Ok((configs * sites, configs * (2.0 * n + 1.0).powi(base_rank as i32)))
        }
        _ => Err(Error::Unsupported(format!("no Følner couples for {}", spec.name()))),
    }
}

fn cube(d: usize, half: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-half..=half).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

fn lamp_configs(q: u32, d: usize, half: i64, cursor_half: i64) -> Vec<GroupElement> {
    let sites: Vec<GroupElement> = cube(d, half).iter().map(|p| GroupElement::vector(p)).collect();
    let cursors: Vec<GroupElement> = cube(d, cursor_half).iter().map(|p| GroupElement::vector(p)).collect();
    let configs = (q as usize).pow(sites.len() as u32);
    let mut out = Vec::with_capacity(configs * cursors.len());
    for mut cfg in 0..configs {
        let mut lamps = Vec::new();
        for s in &sites {
            lamps.push((s.clone(), (cfg % q as usize) as i64));
            cfg /= q as usize;
        }
        for c in &cursors {
            out.push(GroupElement::wreath(lamps.clone(), c.clone()));
        }
    }
    out
}

/// Explicit `(Ω_n, ω_n)`; refused beyond `cap` elements.
pub fn couple_sets(spec: &GroupSpec, n: usize, cap: usize) -> Result<(Vec<GroupElement>, Vec<GroupElement>)> {
    let (outer, _) = couple_sizes(spec, n)?;
    if outer > cap as f64 {
        return Err(Error::Resource {
            what: format!("Følner couple n = {n} for {}", spec.name()),
            limit: cap,
            reached: outer.min(usize::MAX as f64) as usize,
        });
    }
    let m = n as i64;
    Ok(match *spec {
        GroupSpec::FreeAbelian { d } => (
            cube(d, 2 * m).iter().map(|p| GroupElement::vector(p)).collect(),
            cube(d, m).iter().map(|p| GroupElement::vector(p)).collect(),
        ),
        GroupSpec::Heisenberg => {
            let set = |h: i64, v: i64| {
                cube(2, h)
                    .into_iter()
                    .flat_map(|p| (-v..=v).map(move |c| GroupElement::Heisenberg([p[0], p[1], c])))
                    .collect::<Vec<_>>()
            };
            (set(2 * m, 3 * m * m), set(m, m * m))
        }
        GroupSpec::Wreath {
            lamp: LampSpec::Cyclic { order },
            base_rank,
        } => (
            lamp_configs(order, base_rank, 2 * m, 2 * m),
            lamp_configs(order, base_rank, 2 * m, m),
        ),
        _ => unreachable!("couple_sizes rejects other families"),
    })
}

/// `d_S(ω, Γ∖Ω)`: the fewest generator steps from a point of `ω` to leave `Ω`.
pub fn exit_distance(spec: &GroupSpec, omega: &[GroupElement], inner: &[GroupElement]) -> Result<usize> {
    let gens = spec.canonical_generators();
    let index: HashMap<&GroupElement, usize> = omega.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut nbrs = Vec::with_capacity(omega.len());
    for x in omega {
        let row = gens
            .elements
            .iter()
            .map(|s| spec.multiply(x, s).map(|y| index.get(&y).copied()))
            .collect::<Result<Vec<_>>>()?;
        nbrs.push(row);
    }
    // multi-source BFS from the inner boundary, which sits at distance 1
    let mut dist = vec![usize::MAX; omega.len()];
    let mut queue = VecDeque::new();
    for (i, row) in nbrs.iter().enumerate() {
        if row.iter().any(Option::is_none) {
            dist[i] = 1;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for &j in nbrs[i].iter().flatten() {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    inner
        .iter()
        .map(|g| {
            index
                .get(g)
                .map(|&i| dist[i])
                .ok_or_else(|| Error::Invariant(format!("{g} in ω but not in Ω")))
        })
        .try_fold(usize::MAX, |acc, d| d.map(|d| acc.min(d)))
}

/// Builds and verifies the couple of index `n ≥ 1` and computes `λ₁(Ω_n)` for
/// the simple random walk on the canonical generators.
pub fn folner_couple(spec: &GroupSpec, n: usize) -> Result<FolnerCouple> {
    if n == 0 {
        return Err(Error::Precondition("couple index must be positive".into()));
    }
    let (epsilon, c_declared) = couple_constants(spec)?;
    let (outer_size, inner_size) = couple_sizes(spec, n)?;
    let fiber = lamplighter::applies_to(spec);
    let sets = if outer_size <= DISTANCE_CAP.max(SPECTRAL_CAP) as f64 {
        Some(couple_sets(spec, n, DISTANCE_CAP.max(SPECTRAL_CAP))?)
    } else {
        None
    };
    let (distance, distance_measured) = match &sets {
        Some((outer, inner)) if outer.len() <= DISTANCE_CAP => {
            if outer.len() as f64 != outer_size || inner.len() as f64 != inner_size {
                return Err(Error::Invariant(format!("couple sizes for {} n = {n}", spec.name())));
            }
            (exit_distance(spec, outer, inner)?, true)
        }
        _ => (n + 1, false),
    };
    let lambda1 = if fiber {
        lamplighter::box_lambda1(4 * n + 1)
    } else {
        match &sets {
            Some((outer, _)) if outer.len() <= SPECTRAL_CAP => {
                let m = Measure::srw(spec, &spec.canonical_generators())?;
                lambda1(&DirichletOperator::new(&m, outer)?)?.0
            }
            _ => {
                return Err(Error::Resource {
                    what: format!("λ₁ of Følner couple n = {n} for {}", spec.name()),
                    limit: SPECTRAL_CAP,
                    reached: outer_size.min(usize::MAX as f64) as usize,
                })
            }
        }
    };
    let couple = FolnerCouple {
        group: spec.name(),
        n,
        outer_size,
        inner_size,
        distance,
        distance_measured,
        epsilon,
        c_declared,
        lambda1,
        alpha: lambda1 * (n * n) as f64,
    };
    if !(couple.distance as f64 > epsilon * n as f64) {
        return Err(Error::Invariant(format!("couple distance {} ≤ εn for n = {n}", couple.distance)));
    }
    if outer_size > c_declared * inner_size {
        return Err(Error::Invariant(format!("|Ω_n| > C|ω_n| for n = {n}")));
    }
    Ok(couple)
}

/// Couples `1..=n_max`.
pub fn folner_couples(spec: &GroupSpec, n_max: usize) -> Result<Vec<FolnerCouple>> {
    (1..=n_max).map(|n| folner_couple(spec, n)).collect()
}

/// Grid of candidate constants `C` for `F(Cr) ≥ F(r)²`.
fn squaring_constants() -> impl Iterator<Item = f64> {
    (1..=30).map(|k| 1.0 + k as f64 / 10.0)
}

/// `N(λ) ≽ 1/F(λ^{-1/2})` with `F` the piecewise linear extension of
/// `n ↦ |Ω_n|`, valid for `λ ≥ 1/n_max²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoupleTemplate {
    pub group: String,
    pub sizes: Vec<f64>,
    /// `max(1, max_n n²λ₁(Ω_n))`.
    pub alpha: f64,
    /// Smallest grid constant with `F(Cr) ≥ F(r)²` on `[1, n_max/C]`.
    pub c: f64,
}

impl CoupleTemplate {
    /// `F(r)` for `1 ≤ r ≤ n_max`.
    pub fn f(&self, r: f64) -> f64 {
        let last = self.sizes.len() as f64;
        if !(r >= 1.0 && r <= last) {
            return f64::NAN;
        }
        // sizes[k] = |Ω_{k+1}|
        let i = (r.floor() as usize).clamp(1, self.sizes.len() - 1);
        let (a, b) = (self.sizes[i - 1], self.sizes[i]);
        a + (r - i as f64) * (b - a)
    }

    /// `1/F(λ^{-1/2})`, NaN outside `[1/n_max², 1]`.
    pub fn eval(&self, lambda: f64) -> f64 {
        1.0 / self.f(lambda.powf(-0.5))
    }

    pub fn lambda_range(&self) -> (f64, f64) {
        (1.0 / (self.sizes.len() * self.sizes.len()) as f64, 1.0)
    }
}

fn squaring_holds(f: &dyn Fn(f64) -> f64, c: f64, lo: f64, hi: f64, samples: usize) -> bool {
    (0..samples).all(|i| {
        let r = lo * (hi / lo).powf(i as f64 / (samples - 1).max(1) as f64);
        f(c * r) >= 2.0 * f(r) - 1e-12 * f(r).abs()
    })
}

/// Lower template from verified couples; refused when fewer than two
/// couples are given, sizes do not increase, or no `C` in `(1, 4]` gives
/// `F(Cr) ≥ F(r)²` on `[1, n_max/C]`.
pub fn n_lower_from_couples(couples: &[FolnerCouple]) -> Result<CoupleTemplate> {
    if couples.len() < 2 {
        return Err(Error::Precondition("at least two couples are needed to check F(Cr) ≥ F(r)²".into()));
    }
    if couples.iter().enumerate().any(|(i, c)| c.n != i + 1) {
        return Err(Error::Precondition("couples must be indexed 1..=n_max".into()));
    }
    if couples.windows(2).any(|w| !(w[0].outer_size < w[1].outer_size)) {
        return Err(Error::Precondition("|Ω_n| must increase".into()));
    }
    let mut t = CoupleTemplate {
        group: couples[0].group.clone(),
        sizes: couples.iter().map(|c| c.outer_size).collect(),
        alpha: couples.iter().map(|c| c.alpha).fold(1.0, f64::max),
        c: f64::NAN,
    };
    let n_max = couples.len() as f64;
    let ln_f = |r: f64| t.f(r).ln();
    let c = squaring_constants()
        .filter(|&c| n_max / c >= 1.0)
        .find(|&c| squaring_holds(&ln_f, c, 1.0, n_max / c, 64))
        .ok_or_else(|| Error::Domain(format!("F(Cr) ≥ F(r)² fails on [1, n_max/C] for every C ≤ 4 ({})", t.group)))?;
    t.c = c;
    Ok(t)
}

/// Upper template `λ ↦ 1/F(λ^{-1/2})` from a Følner-type growth function
/// `F`, after checking `F(Cr) ≥ F(r)²` on `r_range` for some `C ≤ 4`.
pub fn n_upper_from_folner(f: &Expr, r_range: (f64, f64)) -> Result<(Expr, f64)> {
    let (lo, hi) = r_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Precondition(format!("bad range [{lo}, {hi}]")));
    }
    let ln_f = |r: f64| f.ln_eval(r);
    // strictly increasing on the range
    let grid: Vec<f64> = (0..64).map(|i| lo * (hi / lo).powf(i as f64 / 63.0)).collect();
    if grid.windows(2).any(|w| !(ln_f(w[1]) > ln_f(w[0]))) {
        return Err(Error::Domain("F is not strictly increasing on the range".into()));
    }
    let c = squaring_constants()
        .find(|&c| squaring_holds(&ln_f, c, lo, hi, 256))
        .ok_or_else(|| Error::Domain("F(Cr) ≥ F(r)² fails for every C ≤ 4".into()))?;
    Ok((f.compose(&Expr::var().pow(-0.5)).recip(), c))
}
