//! Acceptance run: one PASS/FAIL line per criterion. Built with
//! `harness = false` so the lines are printed on every run.

use std::sync::OnceLock;
use std::time::Instant;

use isoprofile::asymptotics::fit::log_space;
use isoprofile::asymptotics::{fit_exponent_with, verify_laplace_link, wreath_sandwich, ExtrapolatedEsd, Fit, FitModel};
use isoprofile::group::GroupSpec;
use isoprofile::isoperimetry::profile::box_elements;
use isoprofile::isoperimetry::{cheeger_sweep, csc_folner_lower, folner_function, profile_bruteforce, BoundaryTable, FolnerMode};
use isoprofile::spectral::{arcsine_limit, compare_measures, TwoTailsOutcome};
use isoprofile::spectral::identities::TwoTailsSpectra;
use isoprofile::transforms::functional::{functional_equation_invariants, solve_functional_equation};
use isoprofile::transforms::regularity::log_probes;
use isoprofile::transforms::{bcs_sandwich_check, Direction, Expr, MonotoneFn, StepFn};
use isoprofile::walk::{return_probability, ArithmeticMode, Measure, ReturnSeries, WalkOptions};
use isoprofile::GroupElement;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn srw(spec: &GroupSpec) -> Measure {
    Measure::srw(spec, &spec.canonical_generators()).unwrap()
}

fn z() -> GroupSpec {
    GroupSpec::free_abelian(1)
}

fn z2() -> GroupSpec {
    GroupSpec::free_abelian(2)
}

/// Boundary-extrapolated spectra on the two largest cubes within 4000
/// elements; shared by several criteria.
fn z_spectra() -> &'static ExtrapolatedEsd {
    static CELL: OnceLock<ExtrapolatedEsd> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = srw(&z());
        ExtrapolatedEsd::new(&m, &box_elements(&[2000]), &box_elements(&[4000])).unwrap()
    })
}

fn z2_spectra() -> &'static ExtrapolatedEsd {
    static CELL: OnceLock<ExtrapolatedEsd> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = srw(&z2());
        ExtrapolatedEsd::new(&m, &box_elements(&[45, 45]), &box_elements(&[63, 63])).unwrap()
    })
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

fn series(spec: &GroupSpec, t_max: usize, mode: ArithmeticMode) -> ReturnSeries {
    let opts = WalkOptions {
        mode,
        ..WalkOptions::default()
    };
    return_probability(&srw(spec), t_max, &opts).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let s = series(&z(), 40, ArithmeticMode::Exact);
    let four = BigInt::from(4);
    let z_ok = (0..=20u64).all(|t| {
        let oracle = BigRational::new(binomial(2 * t, t), four.pow(t as u32));
        s.values[2 * t as usize].exact.as_ref() == Some(&oracle)
    });
    // Z²: choose k horizontal steps each way and t-k vertical steps each way
    let s2 = series(&z2(), 24, ArithmeticMode::Exact);
    let z2_ok = (0..=12u64).all(|t| {
        let fact = |n: u64| (1..=n).fold(BigInt::from(1), |a, i| a * i);
        let count: BigInt = (0..=t)
            .map(|k| fact(2 * t) / (fact(k) * fact(k) * fact(t - k) * fact(t - k)))
            .sum();
        let oracle = BigRational::new(count, BigInt::from(16).pow(t as u32));
        s2.values[2 * t as usize].exact.as_ref() == Some(&oracle)
    });
    let secs = start.elapsed().as_secs_f64();
    outcome(z_ok && z2_ok && secs <= 60.0, format!("Z t ≤ 20 exact: {z_ok}, Z² t ≤ 12 exact: {z2_ok}, {secs:.1} s"))
}

fn slope(s: &ReturnSeries, window: (usize, usize), min_decades: f64) -> Fit {
    let (xs, ys): (Vec<f64>, Vec<f64>) = s.even_points(window.0, window.1).into_iter().unzip();
    fit_exponent_with(&xs, &ys, FitModel::Power, min_decades).unwrap()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let fz = slope(&series(&z(), 2000, ArithmeticMode::Auto), (100, 1000), 1.0);
    let fz2 = slope(&series(&z2(), 2000, ArithmeticMode::Auto), (100, 1000), 1.0);
    let fh = slope(&series(&GroupSpec::Heisenberg, 800, ArithmeticMode::Auto), (50, 400), 0.9);
    let secs = start.elapsed().as_secs_f64();
    let pass = (fz.exponent + 0.5).abs() <= 0.05
        && (fz2.exponent + 1.0).abs() <= 0.05
        && (fh.exponent + 2.0).abs() <= 0.1
        && secs <= 600.0;
    outcome(
        pass,
        format!(
            "slopes Z {:.4}, Z² {:.4}, Heisenberg {:.4}; {secs:.1} s",
            fz.exponent, fz2.exponent, fh.exponent
        ),
    )
}

fn esd_slope(x: &ExtrapolatedEsd, window: (f64, f64)) -> f64 {
    let ls = log_space(window.0, window.1, 40);
    let ns: Vec<f64> = ls.iter().map(|&l| x.value(l)).collect();
    fit_exponent_with(&ls, &ns, FitModel::Power, 1.0).unwrap().exponent
}

fn criterion_3() -> Outcome {
    let a = esd_slope(z_spectra(), (1e-3, 1e-1));
    let b = esd_slope(z2_spectra(), (5e-3, 5e-1));
    let large = &z_spectra().large;
    let n = large.size as f64;
    let worst = [0.2, 0.5, 1.0]
        .iter()
        .map(|&l| (large.value(l) - arcsine_limit(l)).abs())
        .fold(0.0, f64::max);
    let pass = (a - 0.5).abs() <= 0.1 && (b - 1.0).abs() <= 0.1 && worst <= 2.0 / n;
    outcome(pass, format!("exponents Z {a:.4}, Z² {b:.4}; arcsine gap {worst:.2e} vs 2/n = {:.2e}", 2.0 / n))
}

fn random_step(rng: &mut ChaCha8Rng) -> StepFn {
    let k = rng.gen_range(1..=30);
    let mut points: Vec<f64> = (0..k).map(|_| 10f64.powf(rng.gen_range(-3.0..0.3))).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let total = rng.gen_range(0.1..=1.0);
    let raw: Vec<f64> = (0..points.len()).map(|_| rng.gen_range(0.01..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let mut acc = 0.0;
    let values: Vec<f64> = raw
        .iter()
        .map(|w| {
            acc += w / sum * total;
            acc.min(total)
        })
        .collect();
    StepFn::new(0.0, points, values).unwrap()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ts = log_probes((1.0, 1e3), 31);
    let (mut checks, mut failures) = (0, 0);
    for _ in 0..1000 {
        let f = random_step(&mut rng);
        for &t in &ts {
            checks += 1;
            if !bcs_sandwich_check(&f, t).is_ok_and(|s| s.pass) {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{checks} checks, {failures} failures"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut holds, mut fails, mut inconclusive) = (0, 0, 0);
    for _ in 0..100 {
        let n = rng.gen_range(5..=50);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        // row-sum scaling bounds the operator norm by 1
        let norm = (0..n).map(|i| a[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        a.iter_mut().for_each(|x| *x /= norm);
        let spectra = TwoTailsSpectra::new(&a, n).unwrap();
        for _ in 0..20 {
            match spectra.check(rng.gen_range(0.0..=1.0)).unwrap().outcome {
                TwoTailsOutcome::Holds => holds += 1,
                TwoTailsOutcome::Fails => fails += 1,
                TwoTailsOutcome::Inconclusive => inconclusive += 1,
            }
        }
    }
    let total = holds + fails + inconclusive;
    outcome(
        fails == 0 && (inconclusive as f64) < 0.01 * total as f64,
        format!("{holds} hold, {fails} fail, {inconclusive} inconclusive of {total}"),
    )
}

fn criterion_6() -> Outcome {
    let ts = log_probes((1e-3, 1e6), 181);
    let mut worst: f64 = 0.0;
    let mut invariants = true;
    let mut ratios = Vec::new();
    let cases: Vec<(Expr, Box<dyn Fn(f64) -> f64>)> = vec![
        (Expr::power(1.0, -2.0), Box::new(|t: f64| 0.5 * (2.0 * t).ln_1p())),
        (Expr::power(1.0, -1.0), Box::new(|t: f64| t.ln_1p())),
        (Expr::power(1.0, -0.5), Box::new(|t: f64| 2.0 * (0.5 * t).ln_1p())),
        // (L∘exp)(s) = s^{-2} gives v = (3t)^{1/3}
        (Expr::log_power(-2.0), Box::new(|t: f64| (3.0 * t).cbrt())),
    ];
    for (expr, exact) in cases {
        let l = MonotoneFn::template(expr, Direction::Decreasing);
        let sol = solve_functional_equation(&l, &ts).unwrap();
        for (&t, &v) in sol.ts.iter().zip(&sol.vs) {
            worst = worst.max((v - exact(t)).abs() / exact(t));
        }
        let inv = functional_equation_invariants(&l, &sol).unwrap();
        invariants &= inv.pass;
        ratios.push(inv.d_measured / inv.c_doubling);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    outcome(
        worst <= 1e-6 && invariants,
        format!("max relative error {worst:.2e}; invariants hold: {invariants}; max D/C {max_ratio:.3} (≤ 2)"),
    )
}

fn criterion_7() -> Outcome {
    let a = cheeger_sweep(&z(), 12).unwrap();
    let b = cheeger_sweep(&z2(), 9).unwrap();
    outcome(
        a.violations == 0 && b.violations == 0 && a.sets > 0 && b.sets > 0,
        format!(
            "Z: {} sets, {} violations; Z²: {} sets, {} violations",
            a.sets, a.violations, b.sets, b.violations
        ),
    )
}

fn criterion_8() -> Outcome {
    let spec = z();
    let gens = spec.canonical_generators();
    let exact = FolnerMode::Exact { max_size: 14 };
    let f1 = folner_function(&spec, &gens, 1.0, exact).unwrap();
    let f2 = folner_function(&spec, &gens, 2.0, exact).unwrap();
    let table = BoundaryTable::build(&spec, &gens, 14).unwrap();
    let formula = (1..=6).all(|r| table.folner(r as f64) == Some(2 * r + 1));
    let mut monotone = true;
    let mut csc = true;
    let mut prev = 0;
    for r in 1..=40 {
        let v = folner_function(&spec, &gens, r as f64, exact).unwrap().value;
        monotone &= v >= prev;
        prev = v;
        csc &= csc_folner_lower(&spec, &gens, r as f64, 1 << 20).unwrap().value <= v;
    }
    let pass = (f1.value, f1.exact, f2.value, f2.exact) == (3, true, 5, true) && formula && monotone && csc;
    outcome(
        pass,
        format!(
            "Fø(1) = {}, Fø(2) = {} (exhaustive); 2r+1 for r ≤ 6: {formula}; monotone: {monotone}; CSC bound: {csc}",
            f1.value, f2.value
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let s = wreath_sandwich(18, 10, 12, (3e-2, 3e-1), 10.0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let d = |r: &isoprofile::asymptotics::ComparisonReport| r.forward.map_or(f64::NAN, |w| w.d);
    let slope = s.report.slope.exponent;
    let pass = s.report.holds && (slope - 0.5).abs() <= 0.12 && secs <= 1800.0;
    outcome(
        pass,
        format!(
            "upper D = {:.3} (c = {:.4}), lower D = {:.3} (C = {}), slope {slope:.4}; {secs:.1} s",
            d(&s.report.upper),
            s.c,
            d(&s.report.lower),
            s.lower.c
        ),
    )
}

fn criterion_10() -> Outcome {
    let window = (1e-3, 1e-1);
    let v = |x: i64| GroupElement::vector(&[x]);
    let u = Measure::uniform(&z(), &[v(1), v(-1), v(2), v(-2)]).unwrap();
    let a = compare_measures(&srw(&z()), &u, &[box_elements(&[2000])], window).unwrap();
    let lazy = Measure::lazy(&z2(), &z2().canonical_generators(), BigRational::new(1.into(), 2.into())).unwrap();
    let b = compare_measures(&srw(&z2()), &lazy, &[box_elements(&[63, 63])], window).unwrap();
    let ds = |r: &isoprofile::asymptotics::ComparisonReport| {
        (r.forward.map_or(f64::INFINITY, |w| w.d), r.backward.map_or(f64::INFINITY, |w| w.d))
    };
    let (a, b) = (ds(a.last()), ds(b.last()));
    let pass = [a.0, a.1, b.0, b.1].iter().all(|&d| d <= 8.0);
    outcome(pass, format!("Z: D = {:.3} / {:.3}; Z²: D = {:.3} / {:.3}", a.0, a.1, b.0, b.1))
}

fn criterion_11() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (spec, e) in [(z(), &z_spectra().large), (z2(), &z2_spectra().large)] {
        let s = series(&spec, 80, ArithmeticMode::Exact);
        let p: Vec<f64> = (0..=40).map(|t| s.get(2 * t).unwrap()).collect();
        let r = verify_laplace_link(&p, e, (1, 40)).unwrap();
        pass &= r.holds;
        parts.push(format!("{}: D = {:.3}, max |ln ratio| {:.3}", spec.name(), r.d, r.max_log_ratio));
    }
    outcome(pass, format!("{} (limit ln 2)", parts.join("; ")))
}

fn criterion_12() -> Outcome {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let s = series(&z2(), 24, ArithmeticMode::Exact);
            let exact: Vec<String> = s.values.iter().map(|v| v.exact.as_ref().unwrap().to_string()).collect();
            let profile = profile_bruteforce(&srw(&z2()), 7, false, 14).unwrap();
            let u = Measure::lazy(&z(), &z().canonical_generators(), BigRational::new(1.into(), 3.into())).unwrap();
            let sets: Vec<Vec<GroupElement>> = [50, 80, 120].iter().map(|&n| box_elements(&[n])).collect();
            let stab = compare_measures(&srw(&z()), &u, &sets, (1e-2, 1e-1)).unwrap();
            (exact, serde_json::to_string(&profile).unwrap(), serde_json::to_string(&stab).unwrap())
        })
    };
    let (a, b, c) = (run(1), run(2), run(4));
    let pass = a == b && b == c;
    outcome(pass, "exact return series, exhaustive profile and stability report at 1, 2 and 4 threads".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact return probabilities", criterion_1),
        ("return probability exponents", criterion_2),
        ("spectral exponents and arcsine limit", criterion_3),
        ("Laplace sandwich on step functions", criterion_4),
        ("two-tails eigencount identity", criterion_5),
        ("functional equation", criterion_6),
        ("Cheeger inequality", criterion_7),
        ("Følner function", criterion_8),
        ("lamplighter spectral sandwich", criterion_9),
        ("stability under change of measure", criterion_10),
        ("Laplace link", criterion_11),
        ("determinism", criterion_12),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str()) || name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        println!(
            "{label} {}: {name}: {} ({:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
