//! Random walks, spectral distributions and L²-isoperimetric profiles on
//! concrete amenable groups, with the Legendre / generalized-inverse calculus
//! that links them.

pub mod asymptotics;
pub mod error;
pub mod group;
pub mod io;
pub mod isoperimetry;
pub mod spectral;
pub mod transforms;
pub mod walk;

pub use error::{Error, Result};
pub use group::{Ball, GeneratingSet, GroupElement, GroupSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
