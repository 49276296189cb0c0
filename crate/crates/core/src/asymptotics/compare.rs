//! Windowed versions of `f ≼ g` and `f ≃ g`: search for constants `C, D` with
//! `f(x) ≤ C·g(D·x)` on every grid point of an explicit window.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NearZero,
    NearInfinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Preceq,
    Simeq,
    DilatationalPreceq,
    DilatationalSimeq,
}

impl Relation {
    pub fn is_dilatational(self) -> bool {
        matches!(self, Relation::DilatationalPreceq | Relation::DilatationalSimeq)
    }
}

/// Coordinates the compared functions are supplied in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// `ln f`; `-∞` stands for `f = 0`.
    Log,
    /// `ln(-ln f)` for `0 < f < 1`; only dilatational relations make sense,
    /// and `f ≤ g` becomes `h_f ≥ h_g`.
    NegLogLog,
}

/// Log-spaced search grid `[lo, hi]` with `per_decade` points per decade.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl Grid {
    pub const CONSTANTS: Grid = Grid {
        lo: 1e-3,
        hi: 1e3,
        per_decade: 25,
    };

    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.lo.log10(), self.hi.log10());
        let n = ((b - a) * self.per_decade as f64).round().max(1.0) as usize;
        (0..=n).map(|i| 10f64.powf(a + (b - a) * i as f64 / n as f64)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompareOptions {
    /// Window sample density, points per decade.
    pub window_density: usize,
    pub constants: Grid,
    pub dilatations: Grid,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            window_density: 20,
            constants: Grid::CONSTANTS,
            dilatations: Grid::CONSTANTS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub c: f64,
    pub d: f64,
    /// Start of the verified range.
    pub x0: f64,
}

/// Worst point for the least-violating `D`, when no witness exists.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Refutation {
    pub x: f64,
    pub d: f64,
    /// `ln f(x) - ln(C_max·g(Dx))` (or the `ln(-ln)` shortfall).
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub relation: Relation,
    pub regime: Regime,
    pub scale: Scale,
    pub window: (f64, f64),
    pub grid_points: usize,
    pub forward: Option<Witness>,
    /// Only for `≃`.
    pub backward: Option<Witness>,
    pub refutation: Option<Refutation>,
    pub holds: bool,
}

/// Per-`x` slack needed: `max_x (ln f(x) - ln g(Dx))` in log scale, or
/// `max_x (h_g(Dx) - h_f(x))` in neg-log-log scale.
fn required(f: &[f64], g: &dyn Fn(f64) -> f64, xs: &[f64], d: f64, scale: Scale) -> (f64, usize) {
    let mut worst = (f64::NEG_INFINITY, 0);
    for (i, (&x, &fx)) in xs.iter().zip(f).enumerate() {
        let gx = g(d * x);
        // rounding allowance relative to the magnitudes compared
        let tol = 1e-12 * fx.abs().max(gx.abs()).max(1.0);
        let need = match scale {
            Scale::Log => {
                if fx == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else if gx == f64::NEG_INFINITY || gx.is_nan() || fx.is_nan() {
                    f64::INFINITY
                } else {
                    fx - gx - tol
                }
            }
            Scale::NegLogLog => {
                if fx == f64::INFINITY {
                    f64::NEG_INFINITY
                } else if gx == f64::INFINITY || gx.is_nan() || fx.is_nan() {
                    f64::INFINITY
                } else {
                    gx - fx - tol
                }
            }
        };
        if need > worst.0 {
            worst = (need, i);
        }
    }
    worst
}

fn window_points(window: (f64, f64), density: usize) -> Result<Vec<f64>> {
    if !(window.0 > 0.0 && window.1 > window.0 && window.1.is_finite()) {
        return Err(Error::Precondition(format!("bad window {window:?}")));
    }
    Ok(Grid {
        lo: window.0,
        hi: window.1,
        per_decade: density.max(1),
    }
    .points())
}

/// One direction of the comparison, in the coordinates given by `scale`.
fn search(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    window: (f64, f64),
    dilatational: bool,
    scale: Scale,
    opts: &CompareOptions,
) -> Result<(Option<Witness>, Refutation, usize)> {
    if scale == Scale::NegLogLog && !dilatational {
        return Err(Error::Precondition("neg-log-log comparisons are dilatational only".into()));
    }
    let xs = window_points(window, opts.window_density)?;
    let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let dense = window_points(window, opts.window_density * 10)?;
    let fdense: Vec<f64> = dense.iter().map(|&x| f(x)).collect();
    let cs: Vec<f64> = if dilatational {
        vec![1.0]
    } else {
        opts.constants.points()
    };
    let c_max = *cs.last().expect("nonempty grid");
    let mut ds = opts.dilatations.points();
    // preference: C closest to 1 (so C ≥ 1), then D closest to 1
    ds.sort_by(|a, b| a.ln().abs().total_cmp(&b.ln().abs()).then(a.total_cmp(b)));
    let first_c = cs.iter().position(|c| *c >= 1.0 - 1e-12).unwrap_or(cs.len() - 1);
    let mut candidates = Vec::new();
    let mut least = Refutation {
        x: xs[0],
        d: 1.0,
        excess: f64::INFINITY,
    };
    for &d in &ds {
        let (need, at) = required(&fx, g, &xs, d, scale);
        let excess = need - c_max.ln();
        if excess < least.excess {
            least = Refutation { x: xs[at], d, excess };
        }
        if let Some(ci) = (first_c..cs.len()).find(|&ci| need <= cs[ci].ln()) {
            candidates.push((ci, d));
        }
    }
    // stable sort keeps the |ln D| order inside each C
    candidates.sort_by_key(|&(ci, _)| ci);
    for (ci, d) in candidates {
        let (need, _) = required(&fdense, g, &dense, d, scale);
        if need <= cs[ci].ln() {
            return Ok((
                Some(Witness {
                    c: cs[ci],
                    d,
                    x0: window.0,
                }),
                least,
                xs.len(),
            ));
        }
    }
    Ok((None, least, xs.len()))
}

/// `f ≼ g` on `window` in the given coordinates.
pub fn preceq_scaled(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    regime: Regime,
    window: (f64, f64),
    dilatational: bool,
    scale: Scale,
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    let (forward, refutation, grid_points) = search(f, g, window, dilatational, scale, opts)?;
    Ok(ComparisonReport {
        relation: if dilatational {
            Relation::DilatationalPreceq
        } else {
            Relation::Preceq
        },
        regime,
        scale,
        window,
        grid_points,
        holds: forward.is_some(),
        refutation: forward.is_none().then_some(refutation),
        forward,
        backward: None,
    })
}

/// `f ≃ g` on `window` in the given coordinates.
pub fn simeq_scaled(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    regime: Regime,
    window: (f64, f64),
    dilatational: bool,
    scale: Scale,
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    let (forward, r1, grid_points) = search(f, g, window, dilatational, scale, opts)?;
    let (backward, r2, _) = search(g, f, window, dilatational, scale, opts)?;
    let refutation = match (forward.is_none(), backward.is_none()) {
        (true, _) => Some(r1),
        (false, true) => Some(r2),
        _ => None,
    };
    Ok(ComparisonReport {
        relation: if dilatational {
            Relation::DilatationalSimeq
        } else {
            Relation::Simeq
        },
        regime,
        scale,
        window,
        grid_points,
        holds: forward.is_some() && backward.is_some(),
        forward,
        backward,
        refutation,
    })
}

fn ln_of(f: &dyn Fn(f64) -> f64) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        let v = f(x);
        if v > 0.0 {
            v.ln()
        } else if v == 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        }
    }
}

/// `f ≼ g` for positive functions given by value.
pub fn preceq(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    regime: Regime,
    window: (f64, f64),
    dilatational: bool,
) -> Result<ComparisonReport> {
    let (lf, lg) = (ln_of(f), ln_of(g));
    preceq_scaled(&lf, &lg, regime, window, dilatational, Scale::Log, &CompareOptions::default())
}

/// `f ≃ g` for positive functions given by value.
pub fn simeq(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    regime: Regime,
    window: (f64, f64),
    dilatational: bool,
) -> Result<ComparisonReport> {
    let (lf, lg) = (ln_of(f), ln_of(g));
    simeq_scaled(&lf, &lg, regime, window, dilatational, Scale::Log, &CompareOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs()
    }

    #[test]
    fn equal_functions_have_unit_witnesses() {
        let f = |x: f64| x.powf(1.5);
        let r = simeq(&f, &f, Regime::NearZero, (1e-4, 1e-1), false).unwrap();
        assert!(r.holds);
        let (w1, w2) = (r.forward.unwrap(), r.backward.unwrap());
        assert!(close(w1.c, 1.0) && close(w1.d, 1.0) && close(w2.c, 1.0) && close(w2.d, 1.0));
    }

    #[test]
    fn pointwise_order_near_infinity() {
        let r = preceq(&|t| 1.0 / t, &|t| t.powf(-0.5), Regime::NearInfinity, (1.0, 1e4), false).unwrap();
        let w = r.forward.unwrap();
        assert!(close(w.c, 1.0) && close(w.d, 1.0));
    }

    #[test]
    fn stretched_exponential_below_power() {
        let f = |l: f64| (-l.powf(-0.5)).exp();
        let g = |l: f64| l.powi(10);
        // wide enough that no D ≤ 1e3 rescues the reverse direction
        let win = (1e-12, 1e-2);
        assert!(preceq(&f, &g, Regime::NearZero, win, false).unwrap().holds);
        let back = preceq(&g, &f, Regime::NearZero, win, false).unwrap();
        assert!(!back.holds);
        assert!(back.refutation.unwrap().excess > 0.0);
    }

    #[test]
    fn power_dilatation_absorbs_constant() {
        // 2x^2 = (√2 x)^2: √2 is off the grid, the next grid point is used
        let f = |x: f64| 2.0 * x * x;
        let g = |x: f64| x * x;
        let r = simeq(&f, &g, Regime::NearZero, (1e-3, 1e-1), true).unwrap();
        assert!(r.holds);
        let (w1, w2) = (r.forward.unwrap(), r.backward.unwrap());
        assert_eq!(w1.c, 1.0);
        assert!(w1.d >= 2f64.sqrt() && w1.d < 2f64.sqrt() * 10f64.powf(1.0 / 25.0));
        // x² ≤ 2x² already holds pointwise
        assert_eq!(w2.d, 1.0);
    }

    #[test]
    fn different_powers_refuted_near_zero() {
        let r = simeq(&|l: f64| l.sqrt(), &|l| l, Regime::NearZero, (1e-8, 1e-1), true).unwrap();
        assert!(!r.holds);
        assert!(r.forward.is_none() || r.backward.is_none());
    }

    #[test]
    fn zero_values() {
        // f vanishing is always dominated; g vanishing where f > 0 is not
        let f = |x: f64| if x < 0.01 { 0.0 } else { x };
        let g = |x: f64| x;
        assert!(preceq(&f, &g, Regime::NearZero, (1e-3, 1e-1), true).unwrap().holds);
        let h = |x: f64| if x < 0.1 { 0.0 } else { x };
        let r = preceq(&g, &h, Regime::NearZero, (1e-3, 1e-1), true).unwrap();
        // D ≥ 100 moves every point past the cutoff
        assert!(r.holds && r.forward.unwrap().d >= 100.0);
    }

    #[test]
    fn neg_log_log_is_dilatational_only() {
        let h = |x: f64| x.ln();
        assert!(preceq_scaled(&h, &h, Regime::NearZero, (0.1, 0.5), false, Scale::NegLogLog, &CompareOptions::default()).is_err());
        let r = simeq_scaled(&h, &h, Regime::NearZero, (0.1, 0.5), true, Scale::NegLogLog, &CompareOptions::default()).unwrap();
        assert!(r.holds);
    }
}
