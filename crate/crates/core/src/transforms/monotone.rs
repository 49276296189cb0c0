use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::quadrature::integrate;
use super::step::StepFn;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    LogLog,
    Linear,
}

/// Tabulated function with positive abscissae and values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFn {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub interpolation: Interpolation,
}

impl SampledFn {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, interpolation: Interpolation) -> Result<SampledFn> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::Precondition("sample table must be nonempty and aligned".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("sample abscissae must increase".into()));
        }
        if interpolation == Interpolation::LogLog && xs.iter().chain(&ys).any(|&v| !(v > 0.0)) {
            return Err(Error::Precondition("log-log interpolation needs positive samples".into()));
        }
        Ok(SampledFn { xs, ys, interpolation })
    }

    /// NaN outside `[xs[0], xs[last]]`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if !(x >= self.xs[0] && x <= self.xs[n - 1]) {
            return f64::NAN;
        }
        let i = self.xs.partition_point(|&p| p <= x).clamp(1, n.max(2) - 1);
        if n == 1 {
            return self.ys[0];
        }
        let (x0, x1, y0, y1) = (self.xs[i - 1], self.xs[i], self.ys[i - 1], self.ys[i]);
        match self.interpolation {
            Interpolation::Linear => y0 + (y1 - y0) * (x - x0) / (x1 - x0),
            Interpolation::LogLog => {
                let s = (x / x0).ln() / (x1 / x0).ln();
                (y0.ln() + s * (y1 / y0).ln()).exp()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Repr {
    Template { expr: Expr },
    Sampled { table: SampledFn },
    Step { step: StepFn },
    /// `x ↦ (2/x) ∫_{x/2}^x inner(s) ds`.
    Smoothed { inner: Box<MonotoneFn> },
}

/// Positive monotone function on `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFn {
    pub repr: Repr,
    pub direction: Direction,
    pub domain: (f64, f64),
}

/// Numeric root finding brackets `[1e-12, 1e12]` unless a domain is tighter.
pub const WINDOW: (f64, f64) = (1e-12, 1e12);

impl MonotoneFn {
    pub fn template(expr: Expr, direction: Direction) -> MonotoneFn {
        MonotoneFn {
            repr: Repr::Template { expr },
            direction,
            domain: (0.0, f64::INFINITY),
        }
    }

    pub fn sampled(table: SampledFn, direction: Direction) -> Result<MonotoneFn> {
        let ok = table.ys.windows(2).all(|w| match direction {
            Direction::Increasing => w[1] >= w[0],
            Direction::Decreasing => w[1] <= w[0],
        });
        if !ok {
            return Err(Error::Precondition("sample table is not monotone".into()));
        }
        let domain = (table.xs[0], *table.xs.last().expect("nonempty"));
        Ok(MonotoneFn {
            repr: Repr::Sampled { table },
            direction,
            domain,
        })
    }

    pub fn step(step: StepFn) -> Result<MonotoneFn> {
        let direction = if step.is_decreasing() {
            Direction::Decreasing
        } else {
            Direction::Increasing
        };
        Ok(MonotoneFn {
            repr: Repr::Step { step },
            direction,
            domain: (0.0, f64::INFINITY),
        })
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.repr {
            Repr::Template { expr } => Some(expr),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Template { expr } => expr.eval(x),
            Repr::Sampled { table } => table.eval(x),
            Repr::Step { step } => step.value(x),
            Repr::Smoothed { inner } => smoothed_value(inner, x),
        }
    }

    pub fn ln_eval(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Template { expr } => expr.ln_eval(x),
            _ => self.eval(x).ln(),
        }
    }

    /// `inf{v > 0 : L(v) ≤ x}` for decreasing `L`.
    ///
    /// Templates with a catalogue inverse are inverted analytically; others by
    /// bisection in `log v` on the domain intersected with [`WINDOW`].
    pub fn generalized_inverse(&self, x: f64) -> Result<f64> {
        if self.direction != Direction::Decreasing {
            return Err(Error::Precondition("generalized inverse needs a decreasing function".into()));
        }
        if let Repr::Step { step } = &self.repr {
            return step.generalized_inverse(x);
        }
        let lo = self.domain.0.max(WINDOW.0);
        let hi = self.domain.1.min(WINDOW.1);
        if let Some(inv) = self.expr().and_then(Expr::inverse) {
            let v = inv.eval(x);
            if v.is_finite() && v > 0.0 {
                return Ok(v);
            }
        }
        if !(self.eval(hi) <= x) {
            return Err(Error::Domain(format!(
                "{x} not above inf L on the accessible range (L({hi:e}) = {:e})",
                self.eval(hi)
            )));
        }
        if self.eval(lo) <= x {
            return Ok(lo);
        }
        let (mut a, mut b) = (lo.ln(), hi.ln());
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.eval(m.exp()) <= x {
                b = m;
            } else {
                a = m;
            }
            if b - a < 1e-13 * (1.0 + b.abs()) {
                break;
            }
        }
        Ok(b.exp())
    }

    /// Wraps this function with the averaging of the smoothing lemma.
    pub fn smoothed(self) -> MonotoneFn {
        let direction = self.direction;
        let domain = self.domain;
        MonotoneFn {
            repr: Repr::Smoothed { inner: Box::new(self) },
            direction,
            domain,
        }
    }
}

fn smoothed_value(inner: &MonotoneFn, x: f64) -> f64 {
    let integral = match &inner.repr {
        Repr::Step { step } => step.integral(x / 2.0, x),
        _ => integrate(&|s| inner.eval(s), x / 2.0, x, 1e-11).unwrap_or(f64::NAN),
    };
    2.0 / x * integral
}
