//! The derivative cocycle, Lyapunov exponents, Riccati slopes and certificates.

pub mod certificate;
pub mod cocycle;
pub mod riccati;

pub use certificate::{cone_certificate, conjugate_point_scan, conjugate_point_scan_with, ConeEntry, ConeReport};
pub use cocycle::{
    cocycle_integrate, cocycle_integrate_gauged, conjugated_generator, gauge_conjugate, generator, lyapunov_exponents,
    lyapunov_exponents_gauged, CocycleFrame, Gauge, LyapunovResult, Mat2,
};
pub use riccati::{bound_constant, riccati_limit, BoundConstant, RiccatiEstimate, RiccatiOptions};
