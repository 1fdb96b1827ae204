//! Numerical laboratory for thermostat flows on the Bolza surface.
//!
//! The pipeline builds the surface group, a holomorphic differential `A`
//! by Poincaré series, solves the coupled vortex equation for the
//! conformal factor, and then integrates the thermostat flow together
//! with its linearised cocycle.

// Guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod differentials;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hyperbolicity;
pub mod sampling;
pub mod vortex;

pub use error::{LabError, Result};
