use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::measure::Measure;
use crate::error::{Error, Result};

/// Monte-Carlo estimate of `p(t)` with a 95% Wilson score interval.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct McEstimate {
    pub t: usize,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    /// Binomial standard error `sqrt(p(1-p)/n)` at the estimate.
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl McEstimate {
    /// Whether `p` lies within `k` standard errors, with a floor of one
    /// count so that exact zeros are not over-interpreted.
    pub fn agrees_within(&self, p: f64, k: f64) -> bool {
        let sigma = (p * (1.0 - p) / self.samples as f64).sqrt().max(1.0 / self.samples as f64);
        (self.estimate - p).abs() <= k * sigma
    }
}

/// Samples `t`-step products of i.i.d. `μ`-distributed elements and counts
/// returns to the identity. Deterministic for a fixed seed.
pub fn mc_return_probability(m: &Measure, t: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Precondition("samples must be >= 1".into()));
    }
    let mut cdf = Vec::with_capacity(m.support.len());
    let mut acc = 0.0;
    for (_, w) in &m.support {
        acc += Measure::to_f64(w);
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = m.spec.identity();
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut x = e.clone();
        for _ in 0..t {
            let u: f64 = rng.gen::<f64>() * acc;
            let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            x = m.spec.multiply(&x, &m.support[i].0)?;
        }
        if x == e {
            hits += 1;
        }
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let z = 1.959963984540054;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    Ok(McEstimate {
        t,
        samples,
        hits,
        estimate: p,
        std_err: (p * (1.0 - p) / n).sqrt(),
        ci_low: (center - half).max(0.0),
        ci_high: (center + half).min(1.0),
    })
}
