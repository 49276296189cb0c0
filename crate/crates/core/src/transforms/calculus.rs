//! Numeric checks of the calculus of generalized inverses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::expr::Expr;
use super::monotone::{Direction, MonotoneFn};
use super::regularity::{compose_exp, doubling_check, log_probes, DEFAULT_MIN_C};
use super::step::StepFn;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClauseCheck {
    pub clause: u8,
    pub description: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest relative discrepancy where an identity is checked, else 0.
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseCalculusReport {
    pub checks: Vec<ClauseCheck>,
    pub pass: bool,
}

/// Decreasing step function with random jumps on `[0.1, ~50]`, tending to a
/// small positive limit.
fn random_step(rng: &mut ChaCha8Rng) -> StepFn {
    let n = rng.gen_range(2..25);
    let mut x = 0.1;
    let mut v = 10.0;
    let (mut points, mut values) = (Vec::new(), Vec::new());
    for _ in 0..n {
        x += rng.gen_range(0.05..2.0);
        v *= rng.gen_range(0.2..0.95);
        points.push(x);
        values.push(v);
    }
    StepFn::new(10.0, points, values).expect("monotone by construction")
}

/// Step function on the union of jump points with values from `eval`.
fn from_eval(points: &[f64], base: f64, eval: impl Fn(f64) -> f64) -> StepFn {
    let mut pts: Vec<f64> = points.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let values = pts.iter().map(|&p| eval(p)).collect();
    StepFn::new(base, pts, values).expect("eval of a decreasing function")
}

fn clause1() -> ClauseCheck {
    // f∘exp doubling ⇒ f doubling
    let cases = [Expr::log_power(-2.0), Expr::log_power(-0.5), Expr::iterated_log(2, Expr::var()).pow(-1.0)];
    let mut failures = 0;
    for e in &cases {
        let f = MonotoneFn::template(e.clone(), Direction::Decreasing);
        let fe = compose_exp(&f);
        let composite = doubling_check(&*fe, (20.0, 600.0), 200, DEFAULT_MIN_C);
        let direct = doubling_check(&|x| f.eval(x), (1e9, 1e12), 200, DEFAULT_MIN_C);
        if composite.pass && !direct.pass {
            failures += 1;
        }
    }
    ClauseCheck {
        clause: 1,
        description: "doubling of f∘exp implies doubling of f".into(),
        cases: cases.len(),
        failures,
        max_error: 0.0,
    }
}

fn clause2(rng: &mut ChaCha8Rng) -> ClauseCheck {
    // (f∘l)⁻¹ = l⁻¹∘f⁻¹ with l = exp
    let mut max_error: f64 = 0.0;
    let mut failures = 0;
    let mut cases = 0;
    // closed form: f = x^{-2}
    let fl = Expr::power(1.0, -2.0).compose(&Expr::var().exp());
    let fl_inv = fl.inverse().expect("catalogue inverse");
    let f_inv = Expr::power(1.0, -2.0).inverse().expect("catalogue inverse");
    for lambda in log_probes((1e-6, 0.5), 50) {
        cases += 1;
        let lhs = fl_inv.eval(lambda);
        let rhs = f_inv.eval(lambda).ln();
        let err = (lhs - rhs).abs() / rhs.abs();
        max_error = max_error.max(err);
        if err > 1e-12 {
            failures += 1;
        }
    }
    // step functions: f∘exp has jumps at log of the jumps of f
    for _ in 0..200 {
        let f = random_step(rng);
        let points: Vec<f64> = f.points.iter().map(|p| p.ln()).collect();
        let composed = StepFn::new(f.base, points, f.values.clone()).expect("same values");
        for _ in 0..10 {
            let lambda = f.last_value() + rng.gen_range(0.0..1.0) * (f.base - f.last_value()) + 1e-12;
            let f_inv = f.generalized_inverse(lambda).expect("above inf");
            // the identity needs l⁻¹ defined at f⁻¹(λ), i.e. λ near zero
            if f_inv <= 1.0 {
                continue;
            }
            cases += 1;
            let lhs = composed.generalized_inverse(lambda).expect("above inf");
            let rhs = f_inv.ln();
            if (lhs - rhs).abs() > 1e-12 * (1.0 + rhs.abs()) {
                failures += 1;
            }
        }
    }
    ClauseCheck {
        clause: 2,
        description: "(f∘l)⁻¹ = l⁻¹∘f⁻¹".into(),
        cases,
        failures,
        max_error,
    }
}

fn clause4(rng: &mut ChaCha8Rng) -> ClauseCheck {
    // f ≤ C g(D·) ⇒ f⁻¹(λ) ≤ g⁻¹(λ/C)/D
    let mut failures = 0;
    let mut cases = 0;
    for _ in 0..200 {
        let g = random_step(rng);
        let h = random_step(rng);
        let c = rng.gen_range(0.5..3.0);
        // dyadic dilation keeps (p/d)·d == p in floating point
        let d = [0.25, 0.5, 2.0, 4.0][rng.gen_range(0..4)];
        let mut pts: Vec<f64> = g.points.iter().map(|p| p / d).collect();
        pts.extend(&h.points);
        let f = from_eval(&pts, (c * g.base).min(h.base), |x| (c * g.value(d * x)).min(h.value(x)));
        for _ in 0..10 {
            let lambda = rng.gen_range(f.last_value().max(c * g.last_value())..f.base.max(c * g.base));
            if lambda <= c * g.last_value() || lambda <= f.last_value() {
                continue;
            }
            cases += 1;
            let lhs = f.generalized_inverse(lambda).expect("above inf");
            let rhs = g.generalized_inverse(lambda / c).expect("above inf") / d;
            if lhs > rhs * (1.0 + 1e-12) {
                failures += 1;
            }
        }
    }
    ClauseCheck {
        clause: 4,
        description: "f ≼ g near infinity implies f⁻¹ ≼ g⁻¹ near zero".into(),
        cases,
        failures,
        max_error: 0.0,
    }
}

fn clause5(rng: &mut ChaCha8Rng) -> ClauseCheck {
    // f ≤ D g ⇒ f⁻¹(λ) ≤ g⁻¹(λ/D)
    let mut failures = 0;
    let mut cases = 0;
    for _ in 0..200 {
        let g = random_step(rng);
        let h = random_step(rng);
        let d = rng.gen_range(0.3..4.0);
        let mut pts = g.points.clone();
        pts.extend(&h.points);
        let f = from_eval(&pts, (d * g.base).min(h.base), |x| (d * g.value(x)).min(h.value(x)));
        for _ in 0..10 {
            let lo = f.last_value().max(d * g.last_value());
            if lo >= f.base {
                break;
            }
            let lambda = lo + rng.gen_range(0.0..1.0) * (f.base - lo);
            if lambda <= lo {
                continue;
            }
            cases += 1;
            let lhs = f.generalized_inverse(lambda).expect("above inf");
            let rhs = g.generalized_inverse(lambda / d).expect("above inf");
            if lhs > rhs * (1.0 + 1e-12) {
                failures += 1;
            }
        }
    }
    ClauseCheck {
        clause: 5,
        description: "f ≤ D g implies f⁻¹(λ) ≤ g⁻¹(λ/D)".into(),
        cases,
        failures,
        max_error: 0.0,
    }
}

fn clause6() -> ClauseCheck {
    // f = k g with f, g doubling ⇒ f⁻¹ ≃ g⁻¹ dilatationally: f⁻¹(λ) = g⁻¹(λ/k)
    let mut failures = 0;
    let mut cases = 0;
    let mut max_error: f64 = 0.0;
    for (k, base) in [(2.0, Expr::log_power(-2.0)), (3.0, Expr::power(1.0, -0.5)), (0.25, Expr::power(1.0, -1.0))] {
        let g = MonotoneFn::template(base.clone(), Direction::Decreasing);
        let f = MonotoneFn::template(base.scale(k), Direction::Decreasing);
        let dl = doubling_check(&|x| f.eval(x), (1e3, 1e9), 50, DEFAULT_MIN_C);
        if !dl.pass {
            failures += 1;
            continue;
        }
        for lambda in log_probes((1e-4, 1e-2), 30) {
            cases += 1;
            let lhs = f.generalized_inverse(lambda).expect("invertible");
            let rhs = g.generalized_inverse(lambda / k).expect("invertible");
            let err = (lhs - rhs).abs() / rhs;
            max_error = max_error.max(err);
            if err > 1e-9 {
                failures += 1;
            }
        }
    }
    ClauseCheck {
        clause: 6,
        description: "f ≃ g doubling implies f⁻¹ ≃ g⁻¹ dilatationally".into(),
        cases,
        failures,
        max_error,
    }
}

/// Clauses (1), (2), (4), (5), (6) on catalogue pairs and on random step
/// functions drawn from a fixed seed.
pub fn inverse_calculus_checks() -> InverseCalculusReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let checks = vec![clause1(), clause2(&mut rng), clause4(&mut rng), clause5(&mut rng), clause6()];
    let pass = checks.iter().all(|c| c.failures == 0 && c.cases > 0);
    InverseCalculusReport { checks, pass }
}
