//! Windowed comparison calculus, exponent fits, the table of closed forms and
//! the end-to-end checks tying profiles, spectra and return probabilities.

pub mod compare;
pub mod fit;
pub mod table;
pub mod verify;

pub use compare::{preceq, simeq, CompareOptions, ComparisonReport, Grid, Refutation, Regime, Relation, Scale, Witness};
pub use fit::{fit_exponent, fit_exponent_with, Fit, FitModel};
pub use table::{Table1Template, TableRow};
pub use verify::{
    csc_exponential_rate, laplace_of_esd, verify_laplace_link, verify_main_formula, verify_sandwich, wreath_sandwich,
    ExtrapolatedEsd, LaplaceLinkReport, MainFormulaReport, MainFormulaRoute, SandwichReport, WreathSandwich,
};
