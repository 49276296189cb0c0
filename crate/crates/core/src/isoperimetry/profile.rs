//! `L²`-isoperimetric profile `Λ(v) = inf_{|Ω| ≤ v} λ₁(Ω)`: exact values by
//! exhaustive search for small `v`, upper bounds from candidate families.

use serde::Serialize;

use super::subsets::{connected_subsets, subsets_with_identity};
use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement, GroupSpec, LampSpec, NONE};
use crate::spectral::{dense_eigenvalues, lamplighter, lambda1, DirichletOperator};
use crate::walk::Measure;

/// Default largest `v` for exhaustive search.
pub const BRUTE_FORCE_CAP: usize = 10;
/// Ball size limit used while enumerating.
const BALL_CAP: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    /// Connected subsets containing the identity.
    BruteForce,
    /// All subsets containing the identity.
    BruteForceUnrestricted,
    Candidates,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub v: usize,
    pub exact: Option<f64>,
    pub upper: Option<f64>,
    /// Minimizing set, as text normal forms.
    pub witness: Option<String>,
    pub witness_size: Option<usize>,
    /// Minimizing set, when it was found by search.
    #[serde(skip)]
    pub witness_elements: Option<Vec<GroupElement>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileEstimate {
    pub group: String,
    pub method: ProfileMethod,
    pub entries: Vec<ProfileEntry>,
}

impl ProfileEstimate {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.exact.or(e.upper).unwrap_or(f64::NAN)).collect()
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values().windows(2).all(|w| w[1] <= w[0])
    }
}

/// Dense Dirichlet matrix on ball indices `sub`, weights aligned with the
/// ball generators.
pub(crate) fn subset_matrix(ball: &Ball, weights: &[f64], diagonal: f64, sub: &[u32]) -> Vec<f64> {
    let n = sub.len();
    let mut a = vec![0.0; n * n];
    for (r, &i) in sub.iter().enumerate() {
        a[r * n + r] = diagonal;
        for (s, &j) in ball.neighbors(i as usize).iter().enumerate() {
            if j == NONE {
                continue;
            }
            if let Ok(c) = sub.binary_search(&j) {
                a[r * n + c] -= weights[s];
            }
        }
    }
    a
}

pub(crate) fn subset_lambda1(ball: &Ball, weights: &[f64], diagonal: f64, sub: &[u32]) -> Result<f64> {
    let a = subset_matrix(ball, weights, diagonal, sub);
    Ok(dense_eigenvalues(&a, sub.len())?[0])
}

/// Ball around the identity for the step set of `m`, with aligned weights.
pub(crate) fn measure_ball(m: &Measure, radius: usize) -> Result<(Ball, Vec<f64>, f64)> {
    let gens = m.step_set()?;
    let weights: Vec<f64> = m.step_weights().iter().map(Measure::to_f64).collect();
    let ball = Ball::new(&m.spec, &gens, radius, BALL_CAP)?;
    Ok((ball, weights, 1.0 - Measure::to_f64(&m.identity_weight())))
}

fn describe(ball: &Ball, sub: &[u32]) -> String {
    let parts: Vec<String> = sub.iter().map(|&i| ball.elements[i as usize].to_string()).collect();
    format!("{{{}}}", parts.join(";"))
}

/// Exact `Λ(v)` for `v = 1..=v_max`, over subsets containing the identity
/// (connected ones unless `unrestricted`). Refuses `v_max > cap`.
pub fn profile_bruteforce(m: &Measure, v_max: usize, unrestricted: bool, cap: usize) -> Result<ProfileEstimate> {
    if v_max == 0 {
        return Err(Error::Precondition("v_max must be positive".into()));
    }
    if v_max > cap {
        return Err(Error::Resource {
            what: "exhaustive profile search size".into(),
            limit: cap,
            reached: v_max,
        });
    }
    let (ball, weights, diagonal) = measure_ball(m, v_max - 1)?;
    let mut best: Vec<Option<(f64, Vec<u32>)>> = vec![None; v_max + 1];
    let mut failure = None;
    let mut visit = |sub: &[u32]| {
        if failure.is_some() {
            return;
        }
        match subset_lambda1(&ball, &weights, diagonal, sub) {
            Ok(l) => {
                let slot = &mut best[sub.len()];
                if slot.as_ref().is_none_or(|(b, _)| l < *b) {
                    *slot = Some((l, sub.to_vec()));
                }
            }
            Err(e) => failure = Some(e),
        }
    };
    if unrestricted {
        subsets_with_identity(&ball, v_max, &mut visit);
    } else {
        connected_subsets(&ball, v_max, &mut visit);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let mut entries = Vec::with_capacity(v_max);
    let mut running: Option<(f64, Vec<u32>)> = None;
    for slot in best.into_iter().skip(1) {
        if let Some((l, s)) = slot {
            if running.as_ref().is_none_or(|(b, _)| l < *b) {
                running = Some((l, s));
            }
        }
        let (l, s) = running.as_ref().expect("singletons exist");
        entries.push(ProfileEntry {
            v: entries.len() + 1,
            exact: Some(*l),
            upper: None,
            witness: Some(describe(&ball, s)),
            witness_size: Some(s.len()),
            witness_elements: Some(s.iter().map(|&i| ball.elements[i as usize].clone()).collect()),
        });
    }
    Ok(ProfileEstimate {
        group: m.spec.name(),
        method: if unrestricted {
            ProfileMethod::BruteForceUnrestricted
        } else {
            ProfileMethod::BruteForce
        },
        entries,
    })
}

/// One member of a candidate family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub label: String,
    pub size: usize,
    pub lambda1: f64,
}

/// `[0,n_1) × ... × [0,n_d)`.
pub fn box_elements(sides: &[usize]) -> Vec<GroupElement> {
    let total: usize = sides.iter().product();
    (0..total)
        .map(|mut k| {
            let v: Vec<i64> = sides
                .iter()
                .map(|&s| {
                    let c = (k % s) as i64;
                    k /= s;
                    c
                })
                .collect();
            GroupElement::vector(&v)
        })
        .collect()
}

/// `|a|, |b| ≤ n`, `|c| ≤ h`.
pub fn heisenberg_box(n: i64, h: i64) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for a in -n..=n {
        for b in -n..=n {
            for c in -h..=h {
                out.push(GroupElement::Heisenberg([a, b, c]));
            }
        }
    }
    out
}

/// Lamps in `[0,L)^d` with values in `Z_q`, cursor in `[0,L)^d`.
pub fn lamp_box(q: u32, d: usize, len: usize) -> Vec<GroupElement> {
    let sites = box_elements(&vec![len; d]);
    let configs = (q as usize).pow(sites.len() as u32);
    let mut out = Vec::with_capacity(configs * sites.len());
    for mut cfg in 0..configs {
        let mut lamps = Vec::new();
        for s in &sites {
            let v = (cfg % q as usize) as i64;
            cfg /= q as usize;
            lamps.push((s.clone(), v));
        }
        for c in &sites {
            out.push(GroupElement::wreath(lamps.clone(), c.clone()));
        }
    }
    out
}

/// `λ₁` of a box in `Z^d` for the simple random walk on `±e_i`:
/// the mean of the one-dimensional values `1 - cos(π/(k+1))`.
pub fn box_lambda1(sides: &[usize]) -> f64 {
    let d = sides.len() as f64;
    sides.iter().map(|&k| 1.0 - (std::f64::consts::PI / (k + 1) as f64).cos()).sum::<f64>() / d
}

fn op_lambda1(m: &Measure, omega: &[GroupElement]) -> Result<f64> {
    Ok(lambda1(&DirichletOperator::new(m, omega)?)?.0)
}

/// Candidate sets of size at most `max_size` for the family of `m.spec`:
/// near-cubic boxes in `Z^d`, boxes `|a|,|b| ≤ n, |c| ≤ n²` in the
/// Heisenberg group, lamp boxes in `Z_q ≀ Z^d`.
pub fn candidates(m: &Measure, max_size: usize) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    match m.spec {
        GroupSpec::FreeAbelian { d } => {
            let closed_form = m.is_canonical_srw();
            for k in 1usize.. {
                if k.pow(d as u32) > max_size {
                    break;
                }
                for j in 0..d {
                    // j sides of length k + 1, the rest k
                    let sides: Vec<usize> = (0..d).map(|i| if i < j { k + 1 } else { k }).collect();
                    let size: usize = sides.iter().product();
                    if size > max_size {
                        break;
                    }
                    let lambda1 = if closed_form {
                        box_lambda1(&sides)
                    } else {
                        op_lambda1(m, &box_elements(&sides))?
                    };
                    out.push(Candidate {
                        label: format!("box {sides:?}"),
                        size,
                        lambda1,
                    });
                }
            }
        }
        GroupSpec::Heisenberg => {
            for n in 0i64.. {
                let size = ((2 * n + 1).pow(2) * (2 * n * n + 1)) as usize;
                if size > max_size {
                    break;
                }
                out.push(Candidate {
                    label: format!("box |a|,|b| <= {n}, |c| <= {}", n * n),
                    size,
                    lambda1: op_lambda1(m, &heisenberg_box(n, n * n))?,
                });
            }
        }
        GroupSpec::Wreath {
            lamp: LampSpec::Cyclic { order },
            base_rank,
        } => {
            let fiber = lamplighter::applies_to(&m.spec) && m.is_canonical_srw();
            for len in 1usize.. {
                let sites = len.pow(base_rank as u32);
                let configs = (order as f64).powi(sites as i32);
                let size_f = configs * sites as f64;
                if size_f > max_size as f64 {
                    break;
                }
                let size = size_f as usize;
                let lambda1 = if fiber {
                    lamplighter::box_lambda1(len)
                } else {
                    op_lambda1(m, &lamp_box(order, base_rank, len))?
                };
                out.push(Candidate {
                    label: format!("lamp box side {len}"),
                    size,
                    lambda1,
                });
            }
        }
        _ => {
            return Err(Error::Unsupported(format!("no candidate family for {}", m.spec.name())));
        }
    }
    Ok(out)
}

/// Upper bounds `Λ(v) ≤ min{λ₁(Ω) : Ω candidate, |Ω| ≤ v}` on `v_grid`.
pub fn profile_candidates(m: &Measure, v_grid: &[usize]) -> Result<ProfileEstimate> {
    let max = v_grid.iter().copied().max().unwrap_or(0);
    let cands = candidates(m, max)?;
    let entries = v_grid
        .iter()
        .map(|&v| {
            let best = cands
                .iter()
                .filter(|c| c.size <= v)
                .min_by(|a, b| a.lambda1.total_cmp(&b.lambda1).then(a.size.cmp(&b.size)));
            ProfileEntry {
                v,
                exact: None,
                upper: best.map(|c| c.lambda1),
                witness: best.map(|c| c.label.clone()),
                witness_size: best.map(|c| c.size),
                witness_elements: None,
            }
        })
        .collect();
    Ok(ProfileEstimate {
        group: m.spec.name(),
        method: ProfileMethod::Candidates,
        entries,
    })
}
