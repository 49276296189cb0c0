//! Dirichlet Laplacians on finite sets, their spectra and spectral
//! distributions.

pub mod dirichlet;
pub mod eigen;
pub mod esd;
pub mod identities;
pub mod lamplighter;
pub mod stability;

pub use dirichlet::{lambda1, spectrum, DirichletOperator, Lambda1Method, SpectrumSummary};
pub use eigen::{dense_eigenvalues, lanczos_smallest, tridiagonal_eigenvalues, DENSE_CAP};
pub use esd::{arcsine_limit, boundary_extrapolate, esd, Esd};
pub use identities::{moment_consistency, stieltjes_integral, two_tails_check, MomentReport, TwoTails, TwoTailsOutcome};
pub use stability::{compare_esds, compare_measures, StabilityLevel, StabilityReport};
