//! Catalogue of the closed forms for return probability, spectral
//! distribution, `L²`-isoperimetric profile and Følner function per class of
//! groups, with the consistency check `N ≃ 1/Λ⁻¹`.

use serde::Serialize;

use super::compare::{simeq_scaled, CompareOptions, ComparisonReport, Regime, Scale};
use crate::error::{Error, Result};
use crate::transforms::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TableRow {
    /// Polynomial growth of degree `d`.
    Polynomial { d: u32 },
    /// Torsion-free solvable, exponential growth, finite Prüfer rank.
    SolvableFiniteRank,
    /// `F ≀ N`, `F` finite, `N` of growth degree `d`.
    FiniteLampWreath { d: u32 },
    /// `Λ ≀ N`, `Λ` infinite of polynomial growth, `N` of degree `d`.
    InfiniteLampWreath { d: u32 },
    /// `k`-fold iterated wreath product with finite lamps.
    IteratedFinite { k: u32 },
    /// `k`-fold iterated wreath product of `Z`.
    IteratedZ { k: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Template {
    pub row: TableRow,
    /// `p(2t)` as `t → ∞`.
    pub return_probability: Expr,
    /// `N(λ)` as `λ → 0`.
    pub spectral: Expr,
    /// `Λ(v)` as `v → ∞`.
    pub profile: Expr,
    /// `Fø(r)` as `r → ∞`.
    pub folner: Expr,
}

fn x() -> Expr {
    Expr::var()
}

/// `log_{(k)}`.
fn logk(k: u32, e: Expr) -> Expr {
    Expr::iterated_log(k as usize, e)
}

/// `exp_{(k)}`.
fn expk(k: u32, e: Expr) -> Expr {
    Expr::iterated_exp(k as usize, e)
}

impl Table1Template {
    pub fn new(row: TableRow) -> Result<Table1Template> {
        let t = match row {
            TableRow::Polynomial { d } | TableRow::FiniteLampWreath { d } | TableRow::InfiniteLampWreath { d } if d == 0 => {
                return Err(Error::Precondition("growth degree must be positive".into()))
            }
            TableRow::IteratedFinite { k } | TableRow::IteratedZ { k } if k < 2 => {
                return Err(Error::Precondition("iterated rows need k ≥ 2".into()))
            }
            TableRow::Polynomial { d } => {
                let d = d as f64;
                Table1Template {
                    row,
                    return_probability: x().pow(-d / 2.0),
                    spectral: x().pow(d / 2.0),
                    profile: x().pow(-2.0 / d),
                    folner: x().pow(d),
                }
            }
            TableRow::SolvableFiniteRank => Table1Template {
                row,
                return_probability: x().pow(1.0 / 3.0).neg().exp(),
                spectral: x().pow(-0.5).neg().exp(),
                profile: x().log().pow(-2.0),
                folner: x().exp(),
            },
            TableRow::FiniteLampWreath { d } => {
                let d = d as f64;
                Table1Template {
                    row,
                    return_probability: x().pow(d / (d + 2.0)).neg().exp(),
                    spectral: x().pow(-d / 2.0).neg().exp(),
                    profile: x().log().pow(-2.0 / d),
                    folner: x().pow(d).exp(),
                }
            }
            TableRow::InfiniteLampWreath { d } => {
                let d = d as f64;
                Table1Template {
                    row,
                    return_probability: x().pow(d / (d + 2.0)).times(x().log().pow(2.0 / (d + 2.0))).neg().exp(),
                    spectral: x().pow(-d / 2.0).times(x().recip().log()).neg().exp(),
                    profile: x().log().times(x().log().log().recip()).pow(-2.0 / d),
                    folner: x().pow(d).times(x().log()).exp(),
                }
            }
            TableRow::IteratedFinite { k } => Table1Template {
                row,
                return_probability: x().times(logk(k - 1, x()).pow(-2.0)).neg().exp(),
                spectral: expk(k - 1, x().pow(-0.5)).neg().exp(),
                profile: logk(k, x()).pow(-2.0),
                folner: expk(k, x()),
            },
            TableRow::IteratedZ { k } => Table1Template {
                row,
                return_probability: x().times(logk(k, x()).times(logk(k - 1, x()).recip()).pow(2.0)).neg().exp(),
                spectral: expk(k - 1, x().pow(-0.5).times(x().recip().log())).neg().exp(),
                profile: logk(k, x()).times(logk(k + 1, x()).recip()).pow(-2.0),
                folner: expk(k, x().times(x().log())),
            },
        };
        Ok(t)
    }

    /// Rows 1–6 with the smallest parameters.
    pub fn catalogue() -> Vec<Table1Template> {
        [
            TableRow::Polynomial { d: 1 },
            TableRow::Polynomial { d: 2 },
            TableRow::Polynomial { d: 4 },
            TableRow::SolvableFiniteRank,
            TableRow::FiniteLampWreath { d: 1 },
            TableRow::FiniteLampWreath { d: 2 },
            TableRow::InfiniteLampWreath { d: 1 },
            TableRow::IteratedFinite { k: 2 },
            TableRow::IteratedZ { k: 2 },
        ]
        .into_iter()
        .map(|r| Table1Template::new(r).expect("valid row"))
        .collect()
    }

    /// Number of exponentials composed into `Λ` before numeric inversion,
    /// so that `ln(-ln N)` stays representable.
    fn depth(&self) -> u32 {
        match self.row {
            TableRow::IteratedFinite { .. } | TableRow::IteratedZ { .. } => 2,
            _ => 1,
        }
    }

    /// `ln(-ln(1/Λ⁻¹(λ)))` = `ln ln Λ⁻¹(λ)`, inverting `Λ ∘ exp^k`
    /// by bisection.
    pub fn inverse_profile_neg_log_log(&self, lambda: f64) -> Result<f64> {
        let k = self.depth();
        let composed = self.profile.compose(&expk(k, x()));
        // w / ln w is monotone only beyond e
        let lo = match self.row {
            TableRow::InfiniteLampWreath { .. } | TableRow::IteratedZ { .. } => 1.0,
            _ => 1e-12f64.ln(),
        };
        let (mut a, mut b) = (lo, 1e12f64.ln());
        let at = |w: f64| composed.eval(w.exp());
        if !(at(b) <= lambda) {
            return Err(Error::Domain(format!("λ = {lambda:e} below the profile on the search range")));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if at(m) <= lambda {
                b = m;
            } else {
                a = m;
            }
        }
        let w = b.exp();
        // ln ln v = ln w for k = 1 and exp^{k-2}(w) for k ≥ 2
        Ok(if k == 1 { w.ln() } else { expk(k - 2, x()).eval(w) })
    }

    /// `1/Λ⁻¹ ≃ N` dilatationally on `window`, compared in `ln(-ln)`
    /// coordinates.
    pub fn self_consistency(&self, window: (f64, f64)) -> Result<ComparisonReport> {
        let derived = |l: f64| self.inverse_profile_neg_log_log(l).unwrap_or(f64::NAN);
        let spectral = |l: f64| self.spectral.ln_neg_ln_eval(l);
        simeq_scaled(&derived, &spectral, Regime::NearZero, window, true, Scale::NegLogLog, &CompareOptions::default())
    }
}

/// Window of the build-time consistency check.
pub const CONSISTENCY_WINDOW: (f64, f64) = (1e-6, 1e-1);
