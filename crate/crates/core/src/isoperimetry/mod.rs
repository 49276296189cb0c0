//! `L²`-isoperimetric profile, Følner function, Cheeger and
//! Coulhon–Saloff-Coste bounds, Følner couples.

pub mod cheeger;
pub mod couples;
pub mod folner;
pub mod profile;
pub mod subsets;

pub use cheeger::{cheeger_lower, cheeger_sweep, CheegerBound, CheegerSweep};
pub use couples::{
    folner_couple, folner_couples, n_lower_from_couples, n_upper_from_folner, CoupleTemplate, FolnerCouple,
};
pub use folner::{csc_folner_lower, folner_function, BoundaryTable, CscBound, FolnerMode, FolnerValue};
pub use profile::{
    candidates, profile_bruteforce, profile_candidates, Candidate, ProfileEntry, ProfileEstimate, ProfileMethod,
};
pub use subsets::connected_subsets;
