//! The vortex equation for the conformal factor `u` of `g = e^{2u}g₀`:
//! `Δ_{g₀}u = e^{2u} − 1 − (m−1)e^{−2(m−1)u}|A|²_{g₀}`.

pub mod fem;
pub mod io;
pub mod mesh;
pub mod solution;

pub use mesh::{build_mesh, build_mesh_with_rings, Mesh, Pairing};
pub use solution::{
    curvature_eval, eval_conformal, nodal_alpha, solve_dirichlet, solve_vortex, solve_vortex_with_initial,
    ConformalSolution, ConformalValue,
};
