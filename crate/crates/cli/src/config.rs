//! Experiment configuration: a JSON file, with command-line flags taking
//! precedence over its fields.

use std::path::{Path, PathBuf};

use isoprofile::asymptotics::table::CONSISTENCY_WINDOW;
use isoprofile::group::{GeneratingSet, GroupElement, GroupSpec};
use isoprofile::isoperimetry::folner::EXACT_CAP;
use isoprofile::isoperimetry::profile::{box_elements, heisenberg_box, lamp_box};
use isoprofile::spectral::DENSE_CAP;
use isoprofile::transforms::{Direction, Expr};
use isoprofile::walk::{ArithmeticMode, Engine, Measure, DEFAULT_SUPPORT_CAP};
use isoprofile::{Ball, Error, Result};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    #[serde(default)]
    pub generators: Generators,
    #[serde(default)]
    pub measure: MeasureChoice,
    #[serde(default)]
    pub mode: ArithmeticMode,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Worker threads; recorded in the manifest, not in the config hash.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub caps: Caps,
    /// Output directory; not part of the config hash.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub ball: BallParams,
    #[serde(default)]
    pub return_prob: ReturnParams,
    #[serde(default)]
    pub spectrum: SpectrumParams,
    #[serde(default)]
    pub profile: ProfileParams,
    #[serde(default)]
    pub folner: FolnerParams,
    #[serde(default)]
    pub legendre: Option<LegendreParams>,
    #[serde(default)]
    pub verify_table: VerifyParams,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generators {
    #[default]
    Canonical,
    Explicit(Vec<Value>),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureChoice {
    /// Uniform on the generating set.
    #[default]
    Srw,
    /// Holding probability as a rational string such as `"1/2"`.
    Lazy { holding: String },
    Uniform { support: Vec<Value> },
    /// `(element, weight)` pairs with rational weight strings.
    Weighted { weights: Vec<(Value, String)> },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Largest ball or support, in elements.
    pub ball: usize,
    /// Largest set handed to the dense eigensolver.
    pub dense: usize,
    /// Largest set size in exhaustive searches.
    pub exhaustive: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            ball: DEFAULT_SUPPORT_CAP,
            dense: DENSE_CAP,
            exhaustive: EXACT_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallParams {
    pub radius: usize,
}

impl Default for BallParams {
    fn default() -> Self {
        BallParams { radius: 10 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReturnParams {
    pub t_max: usize,
    pub engine: Engine,
    pub monte_carlo: Option<MonteCarloParams>,
}

impl Default for ReturnParams {
    fn default() -> Self {
        ReturnParams {
            t_max: 20,
            engine: Engine::Auto,
            monte_carlo: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloParams {
    pub samples: u64,
    pub times: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaChoice {
    /// Word-metric ball for the configured generators.
    Ball { radius: usize },
    /// `[0,n_1) × ... × [0,n_d)` in `Z^d`.
    Box { sides: Vec<usize> },
    /// `|a|, |b| ≤ n`, `|c| ≤ h` in the Heisenberg group.
    HeisenbergBox { n: i64, h: i64 },
    /// All lamp configurations on a cube of side `len` with the cursor in it.
    LampBox { len: usize },
    Elements { elements: Vec<Value> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumParams {
    pub omega: OmegaChoice,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        SpectrumParams {
            omega: OmegaChoice::Ball { radius: 5 },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSearch {
    /// Connected sets containing the identity.
    #[default]
    BruteForce,
    /// All sets containing the identity.
    Unrestricted,
    Candidates,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileParams {
    pub method: ProfileSearch,
    pub v_max: usize,
    /// Volumes for the candidate method; `1..=v_max` when absent.
    pub v_grid: Option<Vec<usize>>,
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams {
            method: ProfileSearch::BruteForce,
            v_max: 10,
            v_grid: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FolnerParams {
    pub r_values: Vec<f64>,
}

impl Default for FolnerParams {
    fn default() -> Self {
        FolnerParams {
            r_values: vec![1.0, 2.0, 3.0, 4.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegendreParams {
    pub function: Expr,
    /// Decreasing functions get `Le`, increasing ones the conjugate `Le*`.
    pub direction: Direction,
    pub t_values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    /// Fit window for `p(2t)`.
    pub t_window: Option<(usize, usize)>,
    /// Fit and comparison window for `N(λ)`.
    pub lambda_window: Option<(f64, f64)>,
    /// Volume window for the profile.
    pub v_window: Option<(f64, f64)>,
    /// Side of the lamplighter box whose spectrum is measured.
    pub lamplighter_box: usize,
    /// Number of Følner couples behind the lower template.
    pub couples: usize,
    pub consistency_window: (f64, f64),
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            t_window: None,
            lambda_window: None,
            v_window: None,
            lamplighter_box: 14,
            couples: 10,
            consistency_window: CONSISTENCY_WINDOW,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.group.validate()?;
        if self.caps.ball == 0 || self.caps.dense == 0 || self.caps.exhaustive == 0 {
            return Err(Error::Precondition("caps must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Precondition("threads must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON (sorted keys) of every field that
    /// affects results, so `threads` and `out` are left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.threads = None;
        c.out = None;
        let value = serde_json::to_value(&c).expect("config serializes");
        let text = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn generating_set(&self) -> Result<GeneratingSet> {
        match &self.generators {
            Generators::Canonical => Ok(self.group.canonical_generators()),
            Generators::Explicit(list) => {
                let elements = list.iter().map(|v| parse_element(&self.group, v)).collect::<Result<_>>()?;
                GeneratingSet::new(&self.group, elements)
            }
        }
    }

    pub fn measure(&self) -> Result<Measure> {
        let spec = &self.group;
        match &self.measure {
            MeasureChoice::Srw => Measure::srw(spec, &self.generating_set()?),
            MeasureChoice::Lazy { holding } => Measure::lazy(spec, &self.generating_set()?, parse_rational(holding)?),
            MeasureChoice::Uniform { support } => {
                let elements: Vec<GroupElement> =
                    support.iter().map(|v| parse_element(spec, v)).collect::<Result<_>>()?;
                Measure::uniform(spec, &elements)
            }
            MeasureChoice::Weighted { weights } => {
                let pairs = weights
                    .iter()
                    .map(|(g, w)| Ok((parse_element(spec, g)?, parse_rational(w)?)))
                    .collect::<Result<Vec<_>>>()?;
                Measure::new(spec, pairs)
            }
        }
    }

    pub fn omega(&self, choice: &OmegaChoice) -> Result<Vec<GroupElement>> {
        let spec = &self.group;
        let omega = match choice {
            OmegaChoice::Ball { radius } => Ball::new(spec, &self.generating_set()?, *radius, self.caps.ball)?.elements,
            OmegaChoice::Box { sides } => match spec {
                GroupSpec::FreeAbelian { d } if *d == sides.len() => box_elements(sides),
                _ => return Err(Error::Precondition(format!("box with {} sides for {}", sides.len(), spec.name()))),
            },
            OmegaChoice::HeisenbergBox { n, h } => match spec {
                GroupSpec::Heisenberg => heisenberg_box(*n, *h),
                _ => return Err(Error::Precondition(format!("heisenberg box for {}", spec.name()))),
            },
            OmegaChoice::LampBox { len } => match spec {
                GroupSpec::Wreath {
                    lamp: isoprofile::group::LampSpec::Cyclic { order },
                    base_rank,
                } => lamp_box(*order, *base_rank, *len),
                _ => return Err(Error::Precondition(format!("lamp box for {}", spec.name()))),
            },
            OmegaChoice::Elements { elements } => {
                elements.iter().map(|v| parse_element(spec, v)).collect::<Result<_>>()?
            }
        };
        if omega.len() > self.caps.dense {
            return Err(Error::Resource {
                what: "dense eigensolver size".into(),
                limit: self.caps.dense,
                reached: omega.len(),
            });
        }
        Ok(omega)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Precondition(format!("bad rational {s:?}: {e}")))
}

fn int_list(v: &Value) -> Option<Vec<i64>> {
    v.as_array()?.iter().map(Value::as_i64).collect()
}

/// Elements of `Z^d` and the Heisenberg group are integer arrays; wreath
/// elements are `{"lamps": [[site, value], ...], "cursor": site}` with sites
/// in the base group's format.
pub fn parse_element(spec: &GroupSpec, v: &Value) -> Result<GroupElement> {
    let bad = || Error::Precondition(format!("{v} is not an element of {}", spec.name()));
    let g = match spec {
        GroupSpec::FreeAbelian { .. } => GroupElement::Vector(int_list(v).ok_or_else(bad)?),
        GroupSpec::Heisenberg => {
            let c: [i64; 3] = int_list(v).ok_or_else(bad)?.try_into().map_err(|_| bad())?;
            GroupElement::Heisenberg(c)
        }
        _ => {
            let (base, _) = spec.wreath_parts().ok_or_else(bad)?;
            let obj = v.as_object().ok_or_else(bad)?;
            if obj.keys().any(|k| k != "lamps" && k != "cursor") {
                return Err(bad());
            }
            let cursor = parse_element(&base, obj.get("cursor").ok_or_else(bad)?)?;
            let mut lamps = Vec::new();
            for pair in obj.get("lamps").and_then(Value::as_array).map_or(&[][..], |a| a.as_slice()) {
                let [site, value] = pair.as_array().map(|a| a.as_slice()).ok_or_else(bad)? else {
                    return Err(bad());
                };
                lamps.push((parse_element(&base, site)?, value.as_i64().ok_or_else(bad)?));
            }
            GroupElement::wreath(lamps, cursor)
        }
    };
    spec.check(&g).map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(g)
}

/// Inverse of [`parse_element`].
pub fn element_json(g: &GroupElement) -> Value {
    match g {
        GroupElement::Vector(v) => Value::from(v.clone()),
        GroupElement::Heisenberg(c) => Value::from(c.to_vec()),
        GroupElement::Wreath(w) => {
            let lamps: Vec<Value> = w
                .lamps
                .iter()
                .map(|(k, v)| Value::Array(vec![element_json(k), Value::from(*v)]))
                .collect();
            serde_json::json!({ "lamps": lamps, "cursor": element_json(&w.cursor) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn config(text: &str) -> ExperimentConfig {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn minimal_config_defaults() {
        let c = config(r#"{"group": {"family": "free_abelian", "d": 1}}"#);
        assert_eq!(c.mode, ArithmeticMode::Auto);
        assert_eq!(c.return_prob.t_max, 20);
        assert!(c.measure().unwrap().is_canonical_srw());
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: std::result::Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"group": {"family": "heisenberg"}, "radius": 3}"#);
        assert!(r.is_err());
    }

    #[test]
    fn hash_ignores_threads_and_out() {
        let a = config(r#"{"group": {"family": "free_abelian", "d": 2}, "threads": 1}"#);
        let mut b = a.clone();
        b.threads = Some(4);
        b.out = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = Some(1);
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn elements_round_trip() {
        let l = GroupSpec::lamplighter(3, 1);
        let v = json!({"lamps": [[[0], 1], [[2], 2]], "cursor": [-1]});
        let g = parse_element(&l, &v).unwrap();
        assert_eq!(element_json(&g), v);
        assert_eq!(g.to_string(), "[[0]:1,[2]:2|[-1]]");
        let h = parse_element(&GroupSpec::Heisenberg, &json!([1, 2, 3])).unwrap();
        assert_eq!(h, GroupElement::Heisenberg([1, 2, 3]));
        // lamp value out of range, wrong rank
        assert!(parse_element(&l, &json!({"lamps": [[[0], 3]], "cursor": [0]})).is_err());
        assert!(parse_element(&GroupSpec::free_abelian(2), &json!([1])).is_err());
    }

    #[test]
    fn weighted_measure_must_be_symmetric() {
        let c = config(
            r#"{"group": {"family": "free_abelian", "d": 1},
                "measure": {"kind": "weighted", "weights": [[[1], "2/3"], [[-1], "1/3"]]}}"#,
        );
        let err = c.measure().unwrap_err().to_string();
        assert!(err.contains("[1]") && err.contains("[-1]"), "{err}");
    }

    #[test]
    fn omega_respects_dense_cap() {
        let mut c = config(r#"{"group": {"family": "free_abelian", "d": 2}}"#);
        c.caps.dense = 10;
        assert!(matches!(
            c.omega(&OmegaChoice::Box { sides: vec![4, 4] }),
            Err(Error::Resource { reached: 16, .. })
        ));
        c.caps.dense = 100;
        assert_eq!(c.omega(&OmegaChoice::Box { sides: vec![4, 4] }).unwrap().len(), 16);
    }
}
