//! Monotone functions, Legendre transforms, generalized inverses and the
//! functional equation linking profiles to return probabilities.

pub mod calculus;
pub mod expr;
pub mod functional;
pub mod legendre;
pub mod monotone;
pub mod ode;
pub mod ratio_bounds;
pub mod quadrature;
pub mod regularity;
pub mod step;

pub use expr::Expr;
pub use legendre::{bcs_sandwich_check, legendre, legendre_conjugate, Extremum, Sandwich};
pub use monotone::{Direction, Interpolation, MonotoneFn, Repr, SampledFn};
pub use step::StepFn;
