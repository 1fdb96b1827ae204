//! The degree-`m` differential `A` and co-closed 1-forms `θ`.

pub mod coexact;
pub mod series;

pub use coexact::{theta_jet, Bump, CoexactOneForm, PotentialJet};
pub use series::{alpha_from_value, AutomorphicForm, SeriesValue};
