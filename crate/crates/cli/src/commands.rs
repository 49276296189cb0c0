use isoprofile::isoperimetry::{
    csc_folner_lower, folner_function, profile_bruteforce, profile_candidates, FolnerMode, ProfileEstimate,
};
use isoprofile::io::{float_to_string, rational_to_decimal};
use isoprofile::spectral::{spectrum, DirichletOperator, Esd};
use isoprofile::transforms::{legendre, legendre_conjugate, Direction, MonotoneFn};
use isoprofile::walk::{mc_return_probability, return_probability, WalkOptions};
use isoprofile::{group::boundary, Ball, Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::{element_json, ExperimentConfig, ProfileSearch};
use crate::output::OutputDir;

fn f(x: f64) -> String {
    float_to_string(x)
}

fn group_meta(cfg: &ExperimentConfig) -> (&'static str, String) {
    ("group", cfg.group.name())
}

pub fn ball(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let gens = cfg.generating_set()?;
    let b = Ball::new(&cfg.group, &gens, cfg.ball.radius, cfg.caps.ball)?;
    let rows: Vec<Vec<String>> = (0..=b.radius)
        .map(|k| {
            let sphere = b.size_at(k) - if k == 0 { 0 } else { b.size_at(k - 1) };
            vec![k.to_string(), sphere.to_string(), b.size_at(k).to_string()]
        })
        .collect();
    out.write_csv(
        "ball.csv",
        &["radius", "sphere", "ball"],
        &rows,
        &[group_meta(cfg), ("generators", gens.len().to_string())],
    )
}

pub fn return_prob(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let m = cfg.measure()?;
    let opts = WalkOptions {
        mode: cfg.mode,
        engine: cfg.return_prob.engine,
        support_cap: cfg.caps.ball,
    };
    let series = return_probability(&m, cfg.return_prob.t_max, &opts)?;
    let rows: Vec<Vec<String>> = series
        .values
        .iter()
        .map(|v| {
            vec![
                v.t.to_string(),
                v.exact.as_ref().map_or(String::new(), |r| r.to_string()),
                v.exact.as_ref().map_or(String::new(), |r| rational_to_decimal(r, 30)),
                f(v.float),
            ]
        })
        .collect();
    let meta = [
        group_meta(cfg),
        ("mode", format!("{:?}", series.mode).to_lowercase()),
        ("engine", format!("{:?}", series.engine).to_lowercase()),
        ("requested", series.requested.to_string()),
        ("achieved", series.achieved.to_string()),
        ("truncated", series.truncated.to_string()),
    ];
    out.write_csv("return_probability.csv", &["t", "p_rational", "p_exact", "p_float"], &rows, &meta)?;

    if let Some(mc) = &cfg.return_prob.monte_carlo {
        let seed = cfg
            .seed
            .ok_or_else(|| Error::Precondition("a seed is required for Monte Carlo sampling".into()))?;
        let mut rows = Vec::new();
        for &t in &mc.times {
            // one sub-seed per time, independent of the order of `times`
            let est = mc_return_probability(&m, t, mc.samples, seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))?;
            let reference = series.get(t).map_or(String::new(), f);
            rows.push(vec![
                t.to_string(),
                est.samples.to_string(),
                est.hits.to_string(),
                f(est.estimate),
                f(est.std_err),
                f(est.ci_low),
                f(est.ci_high),
                reference,
            ]);
        }
        out.write_csv(
            "monte_carlo.csv",
            &["t", "samples", "hits", "estimate", "std_err", "ci_low", "ci_high", "p_series"],
            &rows,
            &[group_meta(cfg), ("seed", seed.to_string())],
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumInfo {
    group: String,
    size: usize,
    boundary_size: usize,
    lambda1: f64,
    lambda_max: f64,
}

pub fn spectrum_cmd(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let m = cfg.measure()?;
    let omega = cfg.omega(&cfg.spectrum.omega)?;
    let s = spectrum(&DirichletOperator::new(&m, &omega)?)?;
    let rows: Vec<Vec<String>> = s.eigenvalues.iter().enumerate().map(|(i, l)| vec![(i + 1).to_string(), f(*l)]).collect();
    let meta = [group_meta(cfg), ("size", s.size.to_string())];
    out.write_csv("eigenvalues.csv", &["index", "lambda"], &rows, &meta)?;
    let e = Esd::from_eigenvalues(&s.eigenvalues);
    let rows: Vec<Vec<String>> = e.step.points.iter().zip(&e.step.values).map(|(l, n)| vec![f(*l), f(*n)]).collect();
    out.write_csv("esd.csv", &["lambda", "n"], &rows, &meta)?;
    let info = SpectrumInfo {
        group: cfg.group.name(),
        size: s.size,
        boundary_size: boundary(&cfg.group, &cfg.group.canonical_generators(), &omega)?.len(),
        lambda1: s.lambda1,
        lambda_max: *s.eigenvalues.last().expect("nonempty set"),
    };
    out.write_json("spectrum.json", &info)
}

#[derive(Serialize)]
struct Witness {
    v: usize,
    lambda: f64,
    elements: Vec<Value>,
}

pub fn profile(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let m = cfg.measure()?;
    let p = &cfg.profile;
    let est: ProfileEstimate = match p.method {
        ProfileSearch::BruteForce | ProfileSearch::Unrestricted => {
            profile_bruteforce(&m, p.v_max, p.method == ProfileSearch::Unrestricted, cfg.caps.exhaustive)?
        }
        ProfileSearch::Candidates => {
            let grid = p.v_grid.clone().unwrap_or_else(|| (1..=p.v_max).collect());
            profile_candidates(&m, &grid)?
        }
    };
    let rows: Vec<Vec<String>> = est
        .entries
        .iter()
        .map(|e| {
            let (value, bound) = match (e.exact, e.upper) {
                (Some(x), _) => (f(x), "exact"),
                (None, Some(u)) => (f(u), "upper"),
                (None, None) => (String::new(), "none"),
            };
            vec![
                e.v.to_string(),
                value,
                bound.to_string(),
                e.witness_size.map_or(String::new(), |s| s.to_string()),
                e.witness.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let meta = [
        group_meta(cfg),
        ("method", format!("{:?}", est.method)),
        ("nonincreasing", est.is_nonincreasing().to_string()),
    ];
    out.write_csv("profile.csv", &["v", "lambda", "bound", "witness_size", "witness"], &rows, &meta)?;
    let witnesses: Vec<Witness> = est
        .entries
        .iter()
        .filter_map(|e| {
            Some(Witness {
                v: e.v,
                lambda: e.exact.or(e.upper)?,
                elements: e.witness_elements.as_ref()?.iter().map(element_json).collect(),
            })
        })
        .collect();
    if !witnesses.is_empty() {
        out.write_json("witnesses.json", &witnesses)?;
    }
    Ok(())
}

pub fn folner(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let gens = cfg.generating_set()?;
    let mode = FolnerMode::Exact {
        max_size: cfg.caps.exhaustive,
    };
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &r in &cfg.folner.r_values {
        let v = folner_function(&cfg.group, &gens, r, mode)?;
        let csc = csc_folner_lower(&cfg.group, &gens, r, cfg.caps.ball)?;
        if csc.value > v.value {
            return Err(Error::Invariant(format!(
                "Følner value {} at r = {r} below the ball bound {}",
                v.value, csc.value
            )));
        }
        values.push((r, v.value));
        rows.push(vec![
            f(r),
            v.value.to_string(),
            v.exact.to_string(),
            csc.value.to_string(),
            csc.radius.to_string(),
        ]);
    }
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = values.windows(2).find(|w| w[1].1 < w[0].1) {
        return Err(Error::Invariant(format!("Følner function decreased between r = {} and r = {}", w[0].0, w[1].0)));
    }
    out.write_csv(
        "folner.csv",
        &["r", "folner", "exact", "csc_lower", "csc_radius"],
        &rows,
        &[group_meta(cfg), ("exact_cap", cfg.caps.exhaustive.to_string())],
    )
}

pub fn legendre_cmd(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let p = cfg
        .legendre
        .as_ref()
        .ok_or_else(|| Error::Precondition("the legendre section of the config is missing".into()))?;
    let m = MonotoneFn::template(p.function.clone(), p.direction);
    let mut rows = Vec::new();
    for &t in &p.t_values {
        let x = match p.direction {
            Direction::Decreasing => legendre(&m, t)?,
            Direction::Increasing => legendre_conjugate(&m, t)?,
        };
        rows.push(vec![f(t), f(x.value), f(x.argument)]);
    }
    let transform = match p.direction {
        Direction::Decreasing => "inf(t x + M(x))",
        Direction::Increasing => "sup(G(x) - t x)",
    };
    out.write_csv(
        "legendre.csv",
        &["t", "value", "argument"],
        &rows,
        &[("transform", transform.into()), ("function", serde_json::to_string(&p.function)?)],
    )
}
