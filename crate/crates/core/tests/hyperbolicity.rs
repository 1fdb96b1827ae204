use num_complex::Complex64;
use std::sync::Arc;
use thermolab::differentials::AutomorphicForm;
use thermolab::dynamics::{Flow, Mode, UnitTangentState};
use thermolab::geometry::FuchsianGroup;
use thermolab::hyperbolicity::{
    bound_constant, cocycle_integrate, cone_certificate, conjugate_point_scan, lyapunov_exponents, riccati_limit,
    RiccatiOptions,
};
use thermolab::sampling::random_states;
use thermolab::vortex::{build_mesh, nodal_alpha, solve_vortex};

fn vortex_flow(m: u32) -> Flow {
    let group = FuchsianGroup::bolza();
    let form = Arc::new(AutomorphicForm::new(&group, m, &[Complex64::new(1.0, 0.0)], 5).unwrap());
    let mesh = Arc::new(build_mesh(&group, 0.1).unwrap());
    let alpha = nodal_alpha(&mesh, &form).unwrap();
    let solution = Arc::new(solve_vortex(&group, mesh, alpha, m, 1e-11).unwrap());
    Flow::new(group, Mode::Vortex { form, solution })
}

#[test]
fn geodesic_cocycle_is_hyperbolic_rotation() {
    let flow = Flow::geodesic(FuchsianGroup::bolza());
    let start = UnitTangentState::new(Complex64::new(0.1, 0.2), 0.3);
    let frame = cocycle_integrate(&flow, &start, 1.0, 1e-3).unwrap();
    let psi = frame.matrix();
    let (c, s) = (1f64.cosh(), 1f64.sinh());
    let expected = [[c, s], [s, c]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((psi[i][j] - expected[i][j]).abs() < 1e-12);
        }
    }
    assert!(frame.abel_residual() < 1e-12);
}

#[test]
fn geodesic_exponents_and_slopes_are_unit() {
    let flow = Flow::geodesic(FuchsianGroup::bolza());
    let start = random_states(flow.group(), 1, 5)[0];
    let lyapunov = lyapunov_exponents(&flow, &start, 1000.0, 1e-2).unwrap();
    assert!((lyapunov.plus - 1.0).abs() < 2e-3 && (lyapunov.minus + 1.0).abs() < 2e-3);
    assert_eq!(lyapunov.average_divergence, 0.0);
    let riccati = riccati_limit(&flow, &start, &RiccatiOptions::default()).unwrap();
    assert!(riccati.converged);
    assert!((riccati.r_u - 1.0).abs() < 1e-8 && (riccati.r_s + 1.0).abs() < 1e-8);
    assert_eq!(conjugate_point_scan(&flow, &start, 30.0, 1e-2).unwrap(), None);
}

#[test]
fn degree_two_slopes_are_explicit() {
    let flow = vortex_flow(2);
    for state in random_states(flow.group(), 5, 17) {
        let va = flow.lambda_jet(&state).unwrap().a.v;
        let r = riccati_limit(&flow, &state, &RiccatiOptions::default()).unwrap();
        assert!((r.r_u - (1.0 + va / 2.0)).abs() < 1e-6, "{} vs {}", r.r_u, 1.0 + va / 2.0);
        assert!((r.r_s - (-1.0 + va / 2.0)).abs() < 1e-6, "{} vs {}", r.r_s, -1.0 + va / 2.0);
    }
}

#[test]
fn unstable_slope_respects_the_lower_bound() {
    let flow = vortex_flow(3);
    let bound = bound_constant(&flow, 4000).unwrap();
    assert!(bound.c > 0.0 && bound.ell < 1.0 && bound.ell > 0.0);
    let options = RiccatiOptions {
        ell: Some(bound.ell),
        ..RiccatiOptions::default()
    };
    for state in random_states(flow.group(), 5, 23) {
        let r = riccati_limit(&flow, &state, &options).unwrap();
        assert!(r.converged);
        assert!(r.r_u > 0.0 && r.r_s < 0.0);
        assert!(r.bound_margin.unwrap() > -1e-4);
    }
}

#[test]
fn abel_identity_and_dissipation() {
    let flow = vortex_flow(3);
    let state = random_states(flow.group(), 1, 31)[0];
    let frame = cocycle_integrate(&flow, &state, 10.0, 1e-2).unwrap();
    assert!(frame.abel_residual() < 1e-5, "{}", frame.abel_residual());
    let lyapunov = lyapunov_exponents(&flow, &state, 200.0, 1e-2).unwrap();
    assert!(lyapunov.plus > 0.1);
    assert!(lyapunov.sum_check.abs() < 1e-3);
}

#[test]
fn vortex_states_carry_a_cone_certificate() {
    let flow = vortex_flow(4);
    let states = random_states(flow.group(), 50, 1);
    let report = cone_certificate(&flow, &states).unwrap();
    assert_eq!(report.entries.len(), 50);
    assert!(report.min_splitting_witness > 0.0);
    assert_eq!(report.anosov_fraction, 1.0);
    for e in &report.entries {
        assert!((e.kappa_p + 1.0).abs() < 1e-10);
    }
    assert_eq!(conjugate_point_scan(&flow, &states[0], 20.0, 1e-2).unwrap(), None);
}

#[test]
fn invalid_schedule_is_a_config_error() {
    let flow = Flow::geodesic(FuchsianGroup::bolza());
    let state = UnitTangentState::new(Complex64::new(0.0, 0.0), 0.0);
    let options = RiccatiOptions {
        schedule: vec![8.0, 4.0],
        ..RiccatiOptions::default()
    };
    assert_eq!(riccati_limit(&flow, &state, &options).unwrap_err().exit_code(), 2);
}
