use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::heisenberg::central_fourier_return;
use super::measure::Measure;
use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement, NONE};
use crate::io::pairwise_sum;

/// Default cap on ball / support size.
pub const DEFAULT_SUPPORT_CAP: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticMode {
    Exact,
    Float,
    #[default]
    Auto,
}

/// How `p(t)` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Convolution unless a faster exact-in-float route applies.
    #[default]
    Auto,
    /// Array convolution over a ball of the support.
    Convolution,
    /// Heisenberg simple random walk only: Fourier transform in the `(b, c)`
    /// coordinates, leaving a tridiagonal operator in `a`.
    CentralFourier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkOptions {
    pub mode: ArithmeticMode,
    pub engine: Engine,
    pub support_cap: usize,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            mode: ArithmeticMode::Auto,
            engine: Engine::Auto,
            support_cap: DEFAULT_SUPPORT_CAP,
        }
    }
}

/// Exact mode is chosen automatically for short series or when
/// `|B(K)| · K` (the convolution work) stays below this.
pub const AUTO_EXACT_WORK: usize = 4_000_000;
pub const AUTO_EXACT_T: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnValue {
    pub t: usize,
    pub exact: Option<BigRational>,
    pub float: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries {
    pub values: Vec<ReturnValue>,
    pub requested: usize,
    /// Largest `t` actually computed.
    pub achieved: usize,
    pub truncated: bool,
    pub mode: ArithmeticMode,
    pub engine: Engine,
}

impl ReturnSeries {
    pub fn get(&self, t: usize) -> Option<f64> {
        self.values.get(t).map(|v| v.float)
    }

    /// `(t, p(t))` for even `t` in `[lo, hi]`, as `(t/2, p(2·(t/2)))` pairs.
    pub fn even_points(&self, lo: usize, hi: usize) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .filter(|v| v.t % 2 == 0 && v.t / 2 >= lo && v.t / 2 <= hi)
            .map(|v| ((v.t / 2) as f64, v.float))
            .collect()
    }
}

/// Sparse distribution `δ_e ∗ μ^{∗step}` with exact weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub step: usize,
    pub weights: BTreeMap<GroupElement, BigRational>,
}

impl Distribution {
    pub fn dirac(m: &Measure) -> Distribution {
        Distribution {
            step: 0,
            weights: BTreeMap::from([(m.spec.identity(), BigRational::one())]),
        }
    }

    pub fn mass(&self) -> BigRational {
        self.weights.values().cloned().sum()
    }
}

/// `(dist ∗ μ)(x) = Σ_γ dist(x γ^-1) μ(γ)`.
pub fn convolve(dist: &Distribution, m: &Measure, cap: usize) -> Result<Distribution> {
    let mut out: BTreeMap<GroupElement, BigRational> = BTreeMap::new();
    for (x, wx) in &dist.weights {
        for (g, wg) in &m.support {
            let y = m.spec.multiply(x, g)?;
            *out.entry(y).or_insert_with(BigRational::zero) += wx * wg;
        }
        if out.len() > cap {
            return Err(Error::Resource {
                what: "distribution support".into(),
                limit: cap,
                reached: out.len(),
            });
        }
    }
    Ok(Distribution {
        step: dist.step + 1,
        weights: out,
    })
}

/// `p(t) = μ^{∗t}(e)` for `t = 0..=T`.
///
/// Uses `p(2k) = Σ_x d_k(x)²` and `p(2k+1) = Σ_x d_k(x) d_{k+1}(x)`, where
/// `d_k = δ_e ∗ μ^{∗k}`, so only `⌈T/2⌉` convolution steps are needed.
/// When the ball outgrows the support cap the series stops early and is
/// flagged as truncated.
pub fn return_probability(m: &Measure, t_max: usize, opts: &WalkOptions) -> Result<ReturnSeries> {
    let k_max = t_max.div_ceil(2);
    let use_fourier = match opts.engine {
        Engine::CentralFourier => {
            if !(matches!(m.spec, crate::group::GroupSpec::Heisenberg) && m.is_canonical_srw()) {
                return Err(Error::Unsupported(
                    "central Fourier engine needs the Heisenberg simple random walk".into(),
                ));
            }
            if opts.mode == ArithmeticMode::Exact {
                return Err(Error::Precondition("central Fourier engine is float-only".into()));
            }
            true
        }
        Engine::Auto => {
            matches!(m.spec, crate::group::GroupSpec::Heisenberg)
                && m.is_canonical_srw()
                && opts.mode != ArithmeticMode::Exact
                && k_max > 60
        }
        Engine::Convolution => false,
    };
    if use_fourier {
        let even = central_fourier_return(k_max)?;
        let values = (0..=t_max)
            .map(|t| ReturnValue {
                t,
                exact: None,
                float: if t % 2 == 0 { even[t / 2] } else { 0.0 },
            })
            .collect();
        let series = ReturnSeries {
            values,
            requested: t_max,
            achieved: t_max,
            truncated: false,
            mode: ArithmeticMode::Float,
            engine: Engine::CentralFourier,
        };
        check_monotone(&series)?;
        return Ok(series);
    }

    let steps = m.step_set()?;
    let ball = Ball::within_cap(&m.spec, &steps, k_max, opts.support_cap)?;
    let k_done = ball.radius;
    let achieved = t_max.min(2 * k_done);
    let mode = match opts.mode {
        ArithmeticMode::Auto => {
            if t_max <= AUTO_EXACT_T || ball.len().saturating_mul(k_done.max(1)) <= AUTO_EXACT_WORK {
                ArithmeticMode::Exact
            } else {
                ArithmeticMode::Float
            }
        }
        other => other,
    };
    let values = match mode {
        ArithmeticMode::Exact => exact_series(m, &ball, achieved),
        _ => float_series(m, &ball, achieved),
    };
    let series = ReturnSeries {
        values,
        requested: t_max,
        achieved,
        truncated: achieved < t_max,
        mode,
        engine: Engine::Convolution,
    };
    check_monotone(&series)?;
    Ok(series)
}

fn check_monotone(series: &ReturnSeries) -> Result<()> {
    let even: Vec<f64> = series.values.iter().filter(|v| v.t % 2 == 0).map(|v| v.float).collect();
    for w in even.windows(2) {
        if w[1] > w[0] * (1.0 + 1e-12) {
            return Err(Error::Invariant(format!(
                "p(2t) increased: {} -> {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Number of ball elements that can carry mass after `k` steps.
fn active(ball: &Ball, k: usize) -> usize {
    ball.size_at(k)
}

fn exact_series(m: &Measure, ball: &Ball, t_max: usize) -> Vec<ReturnValue> {
    let step_w = m.step_weights();
    let hold = m.identity_weight();
    // common denominator D, integer weights w·D
    let mut den = hold.denom().clone();
    for w in &step_w {
        den = den.lcm(w.denom());
    }
    let to_int = |w: &BigRational| -> BigUint {
        (w.numer() * (&den / w.denom())).to_biguint().expect("positive weight")
    };
    let iw: Vec<BigUint> = step_w.iter().map(to_int).collect();
    let ihold = to_int(&hold);
    let has_hold = !ihold.is_zero();
    let den_u = den.to_biguint().expect("positive denominator");
    let ns = iw.len();

    let n = ball.len();
    let mut cur = vec![BigUint::zero(); n];
    cur[0] = BigUint::one();
    let mut out = Vec::with_capacity(t_max + 1);
    let mut k = 0;
    let mut den_pow = BigUint::one(); // D^(2k)
    loop {
        if 2 * k <= t_max {
            let num: BigUint = cur[..active(ball, k)].iter().map(|x| x * x).sum();
            out.push(value(2 * k, &num, &den_pow));
        }
        if 2 * k + 1 > t_max {
            break;
        }
        let mut next = vec![BigUint::zero(); n];
        for i in 0..active(ball, k) {
            let x = &cur[i];
            if x.is_zero() {
                continue;
            }
            if has_hold {
                next[i] += x * &ihold;
            }
            let row = ball.neighbors(i);
            for s in 0..ns {
                let j = row[s];
                debug_assert_ne!(j, NONE);
                next[j as usize] += x * &iw[s];
            }
        }
        let odd: BigUint = cur[..active(ball, k)]
            .iter()
            .zip(&next)
            .map(|(a, b)| a * b)
            .sum();
        out.push(value(2 * k + 1, &odd, &(&den_pow * &den_u)));
        den_pow = &den_pow * &den_u * &den_u;
        cur = next;
        k += 1;
    }
    out
}

fn value(t: usize, num: &BigUint, den: &BigUint) -> ReturnValue {
    let r = BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()));
    let float = ratio_to_f64(num, den);
    ReturnValue {
        t,
        exact: Some(r),
        float,
    }
}

/// Correctly scaled `num / den` for huge operands.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let a = (num >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
    let b = (den >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
    let e = shift_n - shift_d;
    (a / b) * 2f64.powi(e.clamp(-2000, 2000) as i32)
}

fn float_series(m: &Measure, ball: &Ball, t_max: usize) -> Vec<ReturnValue> {
    let step_w: Vec<f64> = m.step_weights().iter().map(Measure::to_f64).collect();
    let hold = Measure::to_f64(&m.identity_weight());
    let ns = step_w.len();
    let n = ball.len();
    let mut cur = vec![0.0f64; n];
    cur[0] = 1.0;
    let mut next = vec![0.0f64; n];
    let mut out = Vec::with_capacity(t_max + 1);
    let mut k = 0;
    let mut buf = Vec::new();
    loop {
        let a = active(ball, k);
        if 2 * k <= t_max {
            buf.clear();
            buf.extend(cur[..a].iter().map(|x| x * x));
            out.push(ReturnValue {
                t: 2 * k,
                exact: None,
                float: pairwise_sum(&buf),
            });
        }
        if 2 * k + 1 > t_max {
            break;
        }
        let a_next = active(ball, k + 1);
        next[..a_next].iter_mut().for_each(|x| *x = 0.0);
        for i in 0..a {
            let x = cur[i];
            if x == 0.0 {
                continue;
            }
            next[i] += x * hold;
            let row = ball.neighbors(i);
            for s in 0..ns {
                next[row[s] as usize] += x * step_w[s];
            }
        }
        buf.clear();
        buf.extend(cur[..a].iter().zip(&next[..a]).map(|(x, y)| x * y));
        out.push(ReturnValue {
            t: 2 * k + 1,
            exact: None,
            float: pairwise_sum(&buf),
        });
        std::mem::swap(&mut cur, &mut next);
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn central_binomial(t: u64) -> BigRational {
        // C(2t,t) / 4^t
        let mut c = BigInt::one();
        for i in 0..t {
            c = c * BigInt::from(2 * t - i) / BigInt::from(i + 1);
        }
        BigRational::new(c, BigInt::from(4u32).pow(t as u32))
    }

    fn z(d: usize) -> Measure {
        let g = GroupSpec::free_abelian(d);
        Measure::srw(&g, &g.canonical_generators()).unwrap()
    }

    #[test]
    fn dirac_and_two_steps() {
        let m = z(1);
        let d1 = convolve(&Distribution::dirac(&m), &m, 1000).unwrap();
        assert_eq!(d1.weights.len(), 2);
        assert!(d1.weights.iter().all(|(g, w)| *w == m.weight(g)));
        let d2 = convolve(&d1, &m, 1000).unwrap();
        let e = |k| GroupElement::vector(&[k]);
        assert_eq!(d2.weights[&e(-2)], q(1, 4));
        assert_eq!(d2.weights[&e(0)], q(1, 2));
        assert_eq!(d2.weights[&e(2)], q(1, 4));
        let mut d = d2;
        for _ in 0..5 {
            d = convolve(&d, &m, 1000).unwrap();
            assert!(d.mass().is_one());
        }
    }

    #[test]
    fn z_exact_values() {
        let s = return_probability(&z(1), 40, &WalkOptions::default()).unwrap();
        assert_eq!(s.mode, ArithmeticMode::Exact);
        assert_eq!(s.values[2].exact.as_ref().unwrap(), &q(1, 2));
        assert_eq!(s.values[4].exact.as_ref().unwrap(), &q(3, 8));
        assert_eq!(s.values[6].exact.as_ref().unwrap(), &q(5, 16));
        assert!(s.values[1].exact.as_ref().unwrap().is_zero());
        assert!(s.values[3].exact.as_ref().unwrap().is_zero());
        for t in 0..=20u64 {
            assert_eq!(s.values[2 * t as usize].exact.as_ref().unwrap(), &central_binomial(t));
        }
        assert_eq!(s.values[10].exact.as_ref().unwrap(), &q(63, 256));
    }

    #[test]
    fn z2_matches_squared_binomial() {
        let s = return_probability(&z(2), 24, &WalkOptions::default()).unwrap();
        assert_eq!(s.values[2].exact.as_ref().unwrap(), &q(1, 4));
        for t in 0..=12u64 {
            let c = central_binomial(t);
            assert_eq!(s.values[2 * t as usize].exact.as_ref().unwrap(), &(&c * &c));
        }
        let f = return_probability(
            &z(2),
            24,
            &WalkOptions {
                mode: ArithmeticMode::Float,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, b) in s.values.iter().zip(&f.values) {
            assert!((a.float - b.float).abs() <= 1e-14 * a.float.max(1e-300));
        }
    }

    #[test]
    fn lazy_measure_includes_holding() {
        let g = GroupSpec::free_abelian(1);
        let m = Measure::lazy(&g, &g.canonical_generators(), q(1, 2)).unwrap();
        let s = return_probability(&m, 3, &WalkOptions::default()).unwrap();
        // p(1) = 1/2, p(2) = 1/4 + 2·(1/4)^2 = 3/8
        assert_eq!(s.values[1].exact.as_ref().unwrap(), &q(1, 2));
        assert_eq!(s.values[2].exact.as_ref().unwrap(), &q(3, 8));
        let d = convolve(&convolve(&Distribution::dirac(&m), &m, 100).unwrap(), &m, 100).unwrap();
        let d3 = convolve(&d, &m, 100).unwrap();
        assert_eq!(s.values[3].exact.as_ref().unwrap(), &d3.weights[&g.identity()]);
    }

    #[test]
    fn truncation_flagged() {
        let g = GroupSpec::lamplighter(2, 1);
        let m = Measure::srw(&g, &g.canonical_generators()).unwrap();
        let s = return_probability(
            &m,
            60,
            &WalkOptions {
                support_cap: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(s.truncated);
        assert!(s.achieved < 60);
        assert_eq!(s.values.len(), s.achieved + 1);
    }

    #[test]
    fn big_ratio_conversion() {
        let num = BigUint::from(3u32) << 5000usize;
        let den = BigUint::from(4u32) << 5000usize;
        assert_eq!(ratio_to_f64(&num, &den), 0.75);
    }
}
