//! End-to-end checks on computed data: the spectral distribution against the
//! inverted isoperimetric profile, against bound templates, and against the
//! Laplace transform link with return probabilities.

use serde::Serialize;

use super::compare::{preceq, simeq, ComparisonReport, Regime};
use super::fit::{fit_exponent_with, log_space, Fit, FitModel};
use crate::error::{Error, Result};
use crate::group::{boundary, GroupElement, GroupSpec};
use crate::isoperimetry::folner::growth;
use crate::isoperimetry::{candidates, folner_couples, n_lower_from_couples, n_upper_from_folner, CoupleTemplate};
use crate::spectral::{esd, lamplighter, DirichletOperator, Esd};
use crate::transforms::regularity::{doubling_check, DoublingReport, DEFAULT_MIN_C};
use crate::transforms::{Expr, StepFn};
use crate::walk::Measure;

/// Tolerance on the spectral exponent in the power-law route.
pub const POWER_TOLERANCE: f64 = 0.1;
/// Largest accepted `max |ln p(2t) - ln ℒ(Dt)|`.
pub const LAPLACE_FACTOR: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum MainFormulaRoute {
    /// `Λ∘exp` doubling: `N ≃ 1/Λ⁻¹` dilatationally.
    Doubling {
        /// `1/Λ⁻¹ ≼ N`, the direction certified by candidate upper bounds.
        lower: ComparisonReport,
        equivalence: ComparisonReport,
    },
    /// `Λ ≃ v^{-2/d}` gives `N ≃ λ^{d/2}`.
    PowerLaw {
        profile_fit: Fit,
        degree: f64,
        spectral_fit: Fit,
        equivalence: ComparisonReport,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MainFormulaReport {
    pub group: String,
    pub v_window: (f64, f64),
    pub lambda_window: (f64, f64),
    /// `(|Ω|, λ₁(Ω))` of the candidate sets used for `Λ`.
    pub profile: Vec<(usize, f64)>,
    pub doubling: DoublingReport,
    pub route: MainFormulaRoute,
    pub holds: bool,
}

/// Running minimum of candidate eigenvalues as a decreasing step function
/// of the volume.
pub fn profile_step(points: &[(usize, f64)]) -> Result<StepFn> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (mut xs, mut ys) = (Vec::new(), Vec::<f64>::new());
    for (v, l) in sorted {
        let best = ys.last().map_or(l, |&p| p.min(l));
        if xs.last() == Some(&(v as f64)) {
            *ys.last_mut().expect("nonempty") = best;
        } else {
            xs.push(v as f64);
            ys.push(best);
        }
    }
    StepFn::new(1.0, xs, ys)
}

/// Builds `Λ` from family candidates with volume up to `v_window.1`, tests
/// `Λ∘exp` for doubling, and compares the spectral estimate `n_est` either
/// with `1/Λ⁻¹` (doubling) or with `λ^{d/2}` after a power-law fit of `Λ`.
pub fn verify_main_formula(
    m: &Measure,
    n_est: &dyn Fn(f64) -> f64,
    v_window: (f64, f64),
    lambda_window: (f64, f64),
) -> Result<MainFormulaReport> {
    if !(v_window.0 >= 1.0 && v_window.1 > v_window.0) {
        return Err(Error::Precondition(format!("bad volume window {v_window:?}")));
    }
    let cands = candidates(m, v_window.1 as usize)?;
    let profile: Vec<(usize, f64)> = cands.iter().map(|c| (c.size, c.lambda1)).collect();
    let step = profile_step(&profile)?;
    let l_exp = |s: f64| step.value(s.exp());
    let (s_lo, s_hi) = (v_window.0.ln().max(1.0), v_window.1.ln() / 2.0);
    if !(s_hi > s_lo) {
        return Err(Error::Precondition("volume window too narrow for a doubling probe".into()));
    }
    let doubling = doubling_check(&l_exp, (s_lo, s_hi), 100, DEFAULT_MIN_C);
    let route = if doubling.pass {
        let template = |l: f64| step.generalized_inverse(l).map_or(f64::NAN, |v| 1.0 / v);
        MainFormulaRoute::Doubling {
            lower: preceq(&template, n_est, Regime::NearZero, lambda_window, true)?,
            equivalence: simeq(n_est, &template, Regime::NearZero, lambda_window, true)?,
        }
    } else {
        let inside: Vec<&(usize, f64)> = profile
            .iter()
            .filter(|(v, _)| (*v as f64) >= v_window.0 && (*v as f64) <= v_window.1)
            .collect();
        let xs: Vec<f64> = inside.iter().map(|p| p.0 as f64).collect();
        let ys: Vec<f64> = inside.iter().map(|p| p.1).collect();
        let profile_fit = fit_exponent_with(&xs, &ys, FitModel::Power, 1.0)?;
        if !(profile_fit.exponent < 0.0) {
            return Err(Error::Domain(format!(
                "Λ is neither doubling after exp nor a decaying power (exponent {})",
                profile_fit.exponent
            )));
        }
        let degree = -2.0 / profile_fit.exponent;
        let ls = log_space(lambda_window.0, lambda_window.1, 40);
        let ns: Vec<f64> = ls.iter().map(|&l| n_est(l)).collect();
        let spectral_fit = fit_exponent_with(&ls, &ns, FitModel::Power, 1.0)?;
        let power = |l: f64| l.powf(degree / 2.0);
        MainFormulaRoute::PowerLaw {
            profile_fit,
            degree,
            spectral_fit,
            equivalence: simeq(n_est, &power, Regime::NearZero, lambda_window, false)?,
        }
    };
    let holds = match &route {
        MainFormulaRoute::Doubling { equivalence, .. } => equivalence.holds,
        MainFormulaRoute::PowerLaw {
            degree,
            spectral_fit,
            equivalence,
            ..
        } => equivalence.holds && (spectral_fit.exponent - degree / 2.0).abs() <= POWER_TOLERANCE,
    };
    Ok(MainFormulaReport {
        group: m.spec.name(),
        v_window,
        lambda_window,
        profile,
        doubling,
        route,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub window: (f64, f64),
    /// `N ≼ upper`, dilatational.
    pub upper: ComparisonReport,
    /// `lower ≼ N`, dilatational.
    pub lower: ComparisonReport,
    /// `ln(-ln N)` against `ln(1/λ)`.
    pub slope: Fit,
    pub holds: bool,
}

/// One-sided template checks around a spectral estimate, plus the
/// stretched-exponential exponent of `N` on the window. `max_d` bounds the
/// accepted dilatations.
pub fn verify_sandwich(
    n_est: &dyn Fn(f64) -> f64,
    upper: &dyn Fn(f64) -> f64,
    lower: &dyn Fn(f64) -> f64,
    window: (f64, f64),
    max_d: f64,
) -> Result<SandwichReport> {
    let up = preceq(n_est, upper, Regime::NearZero, window, true)?;
    let lo = preceq(lower, n_est, Regime::NearZero, window, true)?;
    let ls = log_space(window.0, window.1, 40);
    let inv: Vec<f64> = ls.iter().map(|l| 1.0 / l).collect();
    let ns: Vec<f64> = ls.iter().map(|&l| n_est(l)).collect();
    let slope = fit_exponent_with(&inv, &ns, FitModel::StretchedExp, 1.0)?;
    let within = |r: &ComparisonReport| r.forward.is_some_and(|w| w.d <= max_d && w.d >= 1.0 / max_d);
    Ok(SandwichReport {
        window,
        holds: within(&up) && within(&lo),
        upper: up,
        lower: lo,
        slope,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceLinkReport {
    pub t_window: (usize, usize),
    /// Time dilatation minimizing the worst log ratio.
    pub d: f64,
    /// `max_t |ln p(2t) - ln ℒ(D t)|`.
    pub max_log_ratio: f64,
    /// `(t, p(2t), ℒ(t), ℒ(D t))`.
    pub rows: Vec<(usize, f64, f64, f64)>,
    pub holds: bool,
}

/// `ℒ(t) = ∫ exp(-λt) dN(λ)` for a spectral counting function.
pub fn laplace_of_esd(esd: &Esd, t: f64) -> f64 {
    esd.step.jumps().map(|(l, w)| w * (-l * t).exp()).sum()
}

/// Compares `p(2t)` (`p2t[t]`) with the Laplace transform of `esd` for
/// `t ∈ [t_lo, t_hi]`, searching the time dilatation `D ∈ [1e-3, 1e3]`.
pub fn verify_laplace_link(p2t: &[f64], esd: &Esd, t_window: (usize, usize)) -> Result<LaplaceLinkReport> {
    let (lo, hi) = t_window;
    if lo > hi || hi >= p2t.len() {
        return Err(Error::Precondition(format!("t window {t_window:?} outside the series of length {}", p2t.len())));
    }
    if p2t[lo..=hi].iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Domain("return probabilities must be positive".into()));
    }
    let worst = |d: f64| {
        (lo..=hi)
            .map(|t| (p2t[t].ln() - laplace_of_esd(esd, d * t as f64).ln()).abs())
            .fold(0.0, f64::max)
    };
    let mut best = (1.0, worst(1.0));
    for k in -75..=75 {
        let d = 10f64.powf(k as f64 / 25.0);
        let w = worst(d);
        if w < best.1 - 1e-15 {
            best = (d, w);
        }
    }
    let (d, max_log_ratio) = best;
    let rows = (lo..=hi)
        .map(|t| {
            let tf = t as f64;
            (t, p2t[t], laplace_of_esd(esd, tf), laplace_of_esd(esd, d * tf))
        })
        .collect();
    Ok(LaplaceLinkReport {
        t_window,
        d,
        max_log_ratio,
        rows,
        holds: max_log_ratio <= LAPLACE_FACTOR.ln(),
    })
}

/// Two finite-volume spectral distributions with the leading boundary term
/// removed, `N ≈ (ρ₁N₂ - ρ₂N₁)/(ρ₁ - ρ₂)` with `ρ = |∂Ω|/|Ω|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtrapolatedEsd {
    pub small: Esd,
    pub large: Esd,
    pub rho_small: f64,
    pub rho_large: f64,
}

impl ExtrapolatedEsd {
    /// Boundaries are taken for the canonical generators.
    pub fn new(m: &Measure, small: &[GroupElement], large: &[GroupElement]) -> Result<ExtrapolatedEsd> {
        let gens = m.spec.canonical_generators();
        let rho = |omega: &[GroupElement]| -> Result<f64> {
            Ok(boundary(&m.spec, &gens, omega)?.len() as f64 / omega.len() as f64)
        };
        let (rho_small, rho_large) = (rho(small)?, rho(large)?);
        if !(rho_small > rho_large) {
            return Err(Error::Precondition("the larger set must have the smaller boundary ratio".into()));
        }
        Ok(ExtrapolatedEsd {
            small: esd(&DirichletOperator::new(m, small)?)?,
            large: esd(&DirichletOperator::new(m, large)?)?,
            rho_small,
            rho_large,
        })
    }

    /// Clamped to `[0, 1]`.
    pub fn value(&self, lambda: f64) -> f64 {
        crate::spectral::boundary_extrapolate((&self.small, self.rho_small), (&self.large, self.rho_large), lambda)
            .clamp(0.0, 1.0)
    }
}

/// Rate `c` with `exp(cr) ≤ Fø(r)` for `r ≥ 4|S|`, from the
/// Coulhon–Saloff-Coste bound `Fø(r) ≥ |B(⌊r/4|S|⌋)|/2` and ball sizes up to
/// `radius`.
pub fn csc_exponential_rate(spec: &GroupSpec, radius: usize) -> Result<f64> {
    let gens = spec.canonical_generators();
    let sizes = growth(spec, &gens, radius, 1 << 24)?;
    let scale = (4 * gens.len()) as f64;
    // on [4|S|ρ, 4|S|(ρ+1)) the bound is |B(ρ)|/2
    let c = (1..=radius)
        .map(|rho| (sizes[rho] as f64 / 2.0).ln() / (scale * (rho + 1) as f64))
        .fold(f64::INFINITY, f64::min);
    if !(c > 0.0) {
        return Err(Error::Domain(format!("no exponential Følner evidence for {}", spec.name())));
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WreathSandwich {
    pub box_side: usize,
    /// Rate of the Følner evidence `exp(cr)`.
    pub c: f64,
    /// Upper template `exp(-c λ^{-1/2})`.
    pub upper: Expr,
    pub lower: CoupleTemplate,
    pub report: SandwichReport,
}

/// Spectral sandwich for `Z_2 ≀ Z`: the box spectrum against the
/// Følner-derived upper template and the couple-derived lower template.
pub fn wreath_sandwich(
    box_side: usize,
    couples: usize,
    growth_radius: usize,
    window: (f64, f64),
    max_d: f64,
) -> Result<WreathSandwich> {
    let spec = GroupSpec::lamplighter(2, 1);
    let e = Esd::from_eigenvalues(&lamplighter::box_eigenvalues(box_side)?);
    let c = csc_exponential_rate(&spec, growth_radius)?;
    let (upper, _) = n_upper_from_folner(&Expr::var().scale(c).exp(), (1.0, 1e6))?;
    let lower = n_lower_from_couples(&folner_couples(&spec, couples)?)?;
    let report = verify_sandwich(&|l| e.value(l), &|l| upper.eval(l), &|l| lower.eval(l), window, max_d)?;
    Ok(WreathSandwich {
        box_side,
        c,
        upper,
        lower,
        report,
    })
}
