use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous monotone step function.
///
/// `value(x) = base` for `x < points[0]` and `values[i]` on
/// `[points[i], points[i+1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFn {
    pub base: f64,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFn {
    pub fn new(base: f64, points: Vec<f64>, values: Vec<f64>) -> Result<StepFn> {
        if points.len() != values.len() {
            return Err(Error::Precondition("points and values differ in length".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("jump points must be strictly increasing".into()));
        }
        let f = StepFn { base, points, values };
        if !f.is_nondecreasing() && !f.is_nonincreasing() {
            return Err(Error::Precondition("step function is not monotone".into()));
        }
        Ok(f)
    }

    /// Normalized counting function `x ↦ #{s ≤ x}/n` of sorted samples;
    /// samples closer than `tie_tol` are merged into one jump.
    pub fn counting(sorted: &[f64], tie_tol: f64) -> StepFn {
        let n = sorted.len() as f64;
        let mut points: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            let v = (i + 1) as f64 / n;
            match points.last() {
                Some(&p) if x - p <= tie_tol => *values.last_mut().expect("nonempty") = v,
                _ => {
                    points.push(x);
                    values.push(v);
                }
            }
        }
        StepFn { base: 0.0, points, values }
    }

    fn is_nondecreasing(&self) -> bool {
        let mut prev = self.base;
        self.values.iter().all(|&v| {
            let ok = v >= prev;
            prev = v;
            ok
        })
    }

    fn is_nonincreasing(&self) -> bool {
        let mut prev = self.base;
        self.values.iter().all(|&v| {
            let ok = v <= prev;
            prev = v;
            ok
        })
    }

    pub fn is_increasing(&self) -> bool {
        self.is_nondecreasing()
    }

    pub fn is_decreasing(&self) -> bool {
        self.is_nonincreasing()
    }

    /// Number of jump points `≤ x`.
    fn rank(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p <= x)
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.rank(x) {
            0 => self.base,
            k => self.values[k - 1],
        }
    }

    pub fn left_limit(&self, x: f64) -> f64 {
        match self.points.partition_point(|&p| p < x) {
            0 => self.base,
            k => self.values[k - 1],
        }
    }

    /// `(x_i, F(x_i) - F(x_i^-))` for every jump point.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().enumerate().map(move |(i, &x)| {
            let before = if i == 0 { self.base } else { self.values[i - 1] };
            (x, self.values[i] - before)
        })
    }

    pub fn last_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.base)
    }

    /// `inf{v > 0 : L(v) ≤ x}` for a decreasing step function.
    pub fn generalized_inverse(&self, x: f64) -> Result<f64> {
        if !self.is_nonincreasing() {
            return Err(Error::Precondition("generalized inverse needs a decreasing function".into()));
        }
        let inf = self.last_value();
        if x <= inf {
            return Err(Error::Domain(format!("{x} <= inf L = {inf}")));
        }
        if self.base <= x {
            return Ok(0.0);
        }
        // first jump where the value drops to <= x
        let i = self.values.partition_point(|&v| v > x);
        Ok(self.points[i])
    }

    /// `∫_a^b F(s) ds`, exact.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        let mut x = a;
        let mut k = self.rank(a);
        while x < b {
            let next = if k < self.points.len() { self.points[k].min(b) } else { b };
            let v = if k == 0 { self.base } else { self.values[k - 1] };
            total += v * (next - x);
            x = next;
            k += 1;
        }
        total
    }

    /// Applies `f` to every value (and the base).
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> StepFn {
        StepFn {
            base: f(self.base),
            points: self.points.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}
