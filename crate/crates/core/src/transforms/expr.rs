//! Closed-form templates: a small expression tree over one variable.

use serde::{Deserialize, Serialize};

/// Expression in the variable `x`.
///
/// JSON form: `{"op":"pow","arg":{"op":"var"},"exponent":-0.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Var,
    Const { value: f64 },
    /// `factor · arg`, `factor > 0`.
    Scale { factor: f64, arg: Box<Expr> },
    Pow { arg: Box<Expr>, exponent: f64 },
    Exp { arg: Box<Expr> },
    Log { arg: Box<Expr> },
    Neg { arg: Box<Expr> },
    Recip { arg: Box<Expr> },
    Mul { args: Vec<Expr> },
}

use Expr::*;

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn var() -> Expr {
        Var
    }

    pub fn constant(value: f64) -> Expr {
        Const { value }
    }

    pub fn scale(self, factor: f64) -> Expr {
        Scale { factor, arg: bx(self) }
    }

    pub fn pow(self, exponent: f64) -> Expr {
        Pow { arg: bx(self), exponent }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn exp(self) -> Expr {
        Exp { arg: bx(self) }
    }

    pub fn log(self) -> Expr {
        Log { arg: bx(self) }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Expr {
        Neg { arg: bx(self) }
    }

    pub fn recip(self) -> Expr {
        Recip { arg: bx(self) }
    }

    pub fn times(self, other: Expr) -> Expr {
        Mul { args: vec![self, other] }
    }

    /// `c · x^p`.
    pub fn power(c: f64, p: f64) -> Expr {
        Var.pow(p).scale(c)
    }

    /// `log(x)^p`.
    pub fn log_power(p: f64) -> Expr {
        Var.log().pow(p)
    }

    /// `exp(-c · x^{-a})`, the decreasing-to-zero stretched exponential near 0.
    pub fn stretched_exp_decay(c: f64, a: f64) -> Expr {
        Var.pow(-a).scale(c).neg().exp()
    }

    /// `exp(c · x^a)`.
    pub fn stretched_exp_growth(c: f64, a: f64) -> Expr {
        Var.pow(a).scale(c).exp()
    }

    /// `exp^{∘k}(inner)`.
    pub fn iterated_exp(k: usize, inner: Expr) -> Expr {
        (0..k).fold(inner, |e, _| e.exp())
    }

    /// `log^{∘k}(inner)`.
    pub fn iterated_log(k: usize, inner: Expr) -> Expr {
        (0..k).fold(inner, |e, _| e.log())
    }

    /// Substitutes `inner` for the variable.
    pub fn compose(&self, inner: &Expr) -> Expr {
        match self {
            Var => inner.clone(),
            Const { value } => Const { value: *value },
            Scale { factor, arg } => Scale {
                factor: *factor,
                arg: bx(arg.compose(inner)),
            },
            Pow { arg, exponent } => Pow {
                arg: bx(arg.compose(inner)),
                exponent: *exponent,
            },
            Exp { arg } => Exp { arg: bx(arg.compose(inner)) },
            Log { arg } => Log { arg: bx(arg.compose(inner)) },
            Neg { arg } => Neg { arg: bx(arg.compose(inner)) },
            Recip { arg } => Recip { arg: bx(arg.compose(inner)) },
            Mul { args } => Mul {
                args: args.iter().map(|a| a.compose(inner)).collect(),
            },
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Var => x,
            Const { value } => *value,
            Neg { arg } => -arg.eval(x),
            Log { arg } => arg.ln_eval(x),
            Exp { arg } => arg.eval(x).exp(),
            Scale { factor, arg } => factor * arg.eval(x),
            Pow { arg, exponent } => arg.eval(x).powf(*exponent),
            Recip { arg } => 1.0 / arg.eval(x),
            Mul { args } => args.iter().map(|a| a.eval(x)).product(),
        }
    }

    /// `ln(f(x))`, evaluated without forming `f(x)` where possible.
    pub fn ln_eval(&self, x: f64) -> f64 {
        match self {
            Var => x.ln(),
            Const { value } => value.ln(),
            Scale { factor, arg } => factor.ln() + arg.ln_eval(x),
            Pow { arg, exponent } => exponent * arg.ln_eval(x),
            Exp { arg } => arg.eval(x),
            Log { arg } => arg.lnln_eval(x),
            Recip { arg } => -arg.ln_eval(x),
            Mul { args } => args.iter().map(|a| a.ln_eval(x)).sum(),
            Neg { .. } => f64::NAN,
        }
    }

    /// `ln(ln f(x))` for `f(x) > 1`.
    pub fn lnln_eval(&self, x: f64) -> f64 {
        match self {
            Exp { arg } => arg.ln_eval(x),
            Pow { arg, exponent } if *exponent > 0.0 => exponent.ln() + arg.lnln_eval(x),
            Recip { arg } => (-arg.ln_eval(x)).ln(),
            _ => self.ln_eval(x).ln(),
        }
    }

    /// `ln(-ln f(x))` for `0 < f(x) < 1`; stays finite for doubly
    /// exponential decay.
    pub fn ln_neg_ln_eval(&self, x: f64) -> f64 {
        match self {
            Exp { arg } => match arg.as_ref() {
                Neg { arg: inner } => inner.ln_eval(x),
                other => (-other.eval(x)).ln(),
            },
            Recip { arg } => arg.lnln_eval(x),
            Pow { arg, exponent } if *exponent > 0.0 => exponent.ln() + arg.ln_neg_ln_eval(x),
            _ => (-self.ln_eval(x)).ln(),
        }
    }

    pub fn derivative(&self) -> Expr {
        match self {
            Var => Const { value: 1.0 },
            Const { .. } => Const { value: 0.0 },
            Scale { factor, arg } => arg.derivative().scale(*factor),
            Neg { arg } => arg.derivative().neg(),
            Pow { arg, exponent } => arg
                .as_ref()
                .clone()
                .pow(exponent - 1.0)
                .scale(*exponent)
                .times(arg.derivative()),
            Exp { arg } => self.clone().times(arg.derivative()),
            Log { arg } => arg.as_ref().clone().recip().times(arg.derivative()),
            Recip { arg } => arg.as_ref().clone().pow(-2.0).times(arg.derivative()).neg(),
            Mul { args } => {
                // sums are not in the catalogue: at most one non-constant factor
                let (consts, vars): (Vec<&Expr>, Vec<&Expr>) =
                    args.iter().partition(|a| matches!(a, Const { .. }));
                let c: f64 = consts.iter().map(|a| a.eval(0.0)).product();
                match vars.as_slice() {
                    [] => Const { value: 0.0 },
                    [single] => single.derivative().scale(c),
                    _ => Const { value: f64::NAN },
                }
            }
        }
    }

    /// Exact inverse for chains of invertible unary maps applied to `x`.
    pub fn inverse(&self) -> Option<Expr> {
        self.invert_onto(Var)
    }

    // Returns g with self(g(y)) = y, built by peeling outer operations.
    fn invert_onto(&self, y: Expr) -> Option<Expr> {
        match self {
            Var => Some(y),
            Const { .. } => None,
            Scale { factor, arg } => arg.invert_onto(y.scale(1.0 / factor)),
            Pow { arg, exponent } if *exponent != 0.0 => arg.invert_onto(y.pow(1.0 / exponent)),
            Exp { arg } => arg.invert_onto(y.log()),
            Log { arg } => arg.invert_onto(y.exp()),
            Neg { arg } => arg.invert_onto(y.neg()),
            Recip { arg } => arg.invert_onto(y.recip()),
            Mul { args } => {
                let (consts, vars): (Vec<&Expr>, Vec<&Expr>) =
                    args.iter().partition(|a| matches!(a, Const { .. }));
                let c: f64 = consts.iter().map(|a| a.eval(0.0)).product();
                match vars.as_slice() {
                    [single] if c > 0.0 => single.invert_onto(y.scale(1.0 / c)),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_round_trip() {
        let cases = [
            Expr::power(1.0, -1.0),
            Expr::power(3.0, -0.5),
            Expr::log_power(-2.0),
            Expr::stretched_exp_decay(2.0, 0.5),
            Expr::iterated_log(2, Var).pow(-2.0),
        ];
        for e in cases {
            let inv = e.inverse().expect("invertible");
            for y in [0.1, 0.2, 0.3] {
                let x = inv.eval(y);
                assert!((e.eval(x) - y).abs() <= 1e-12 * y, "{e:?} at {y}");
            }
        }
        assert!(Var.times(Var.log()).inverse().is_none());
    }

    #[test]
    fn table_row_one_inverse() {
        // L(v) = v^{-2/d}  =>  L^{-1}(λ) = λ^{-d/2}
        for d in [1.0, 2.0, 4.0] {
            let inv = Expr::power(1.0, -2.0 / d).inverse().unwrap();
            assert!((inv.eval(0.01) - 0.01f64.powf(-d / 2.0)).abs() < 1e-9 * 0.01f64.powf(-d / 2.0));
        }
    }

    #[test]
    fn log_domain_evaluation() {
        // exp(-exp(x^{-1/2})) at x = 1e-6: the value underflows, ln(-ln) does not
        let n = Var.pow(-0.5).exp().neg().exp();
        assert!((n.ln_neg_ln_eval(1e-6) - 1000.0).abs() < 1e-9);
        let big = Var.pow(-0.5).exp().exp();
        assert!((big.recip().ln_neg_ln_eval(1e-6) - 1000.0).abs() < 1e-9);
        let e = Expr::stretched_exp_decay(1.0, 0.5);
        assert!((e.ln_eval(1e-4) + 100.0).abs() < 1e-12);
        assert!((Var.log().eval(1e300) - 1e300f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            Expr::power(2.0, -0.5),
            Expr::log_power(-2.0),
            Expr::stretched_exp_decay(1.0, 0.5),
            Var.recip(),
        ];
        for e in cases {
            let d = e.derivative();
            for x in [0.3, 2.0, 7.0] {
                let h = 1e-6 * x;
                let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
                assert!((d.eval(x) - fd).abs() <= 1e-6 * fd.abs().max(1e-8), "{e:?} at {x}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let e = Expr::stretched_exp_decay(1.0, 0.5);
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.starts_with(r#"{"op":"exp""#));
        assert_eq!(serde_json::from_str::<Expr>(&s).unwrap(), e);
    }
}
