//! Symmetric measures, convolution powers and return probabilities.

mod convolve;
pub mod heisenberg;
mod measure;
mod montecarlo;

pub use convolve::{
    convolve, ratio_to_f64, return_probability, ArithmeticMode, Distribution, Engine, ReturnSeries,
    ReturnValue, WalkOptions, AUTO_EXACT_T, AUTO_EXACT_WORK, DEFAULT_SUPPORT_CAP,
};
pub use measure::Measure;
pub use montecarlo::{mc_return_probability, McEstimate};
