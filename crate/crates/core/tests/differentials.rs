use num_complex::Complex64;
use std::sync::Arc;
use thermolab::differentials::{AutomorphicForm, Bump, CoexactOneForm};
use thermolab::dynamics::{Flow, Mode, UnitTangentState};
use thermolab::geometry::{FuchsianGroup, Octagon};
use thermolab::sampling::random_states;

fn unit_seed() -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0)]
}

#[test]
fn fast_evaluation_matches_direct_sum() {
    let group = FuchsianGroup::bolza();
    let form = AutomorphicForm::new(&group, 3, &unit_seed(), 5).unwrap();
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, -0.2),
        Octagon::vertex(2) * 0.98,
        Octagon::side_point(5, 0.3) * 0.99,
    ] {
        let (v_fast, d_fast) = form.fast_eval(z).unwrap();
        let (v, d) = form.direct_sum(z);
        assert!((v_fast - v).norm() <= 1e-9 * v.norm().max(1.0), "{z}: {v_fast} vs {v}");
        assert!((d_fast - d).norm() <= 1e-8 * d.norm().max(1.0), "{z}: {d_fast} vs {d}");
    }
}

#[test]
fn weight_m_automorphy_within_tail() {
    let group = FuchsianGroup::bolza();
    let form = AutomorphicForm::new(&group, 3, &unit_seed(), 6).unwrap();
    let z = Complex64::new(0.25, 0.1);
    let (az, _) = form.direct_sum(z);
    for k in 0..8 {
        let g = group.generator(k);
        let (agz, _) = form.direct_sum(g.apply(z));
        let pulled = agz * g.derivative(z).powi(3);
        let scale = form.tail_estimate(z);
        assert!((pulled - az).norm() < 10.0 * scale, "generator {k}: {} > {scale:e}", (pulled - az).norm());
    }
}

#[test]
fn alpha_is_a_function_on_the_surface() {
    let group = FuchsianGroup::bolza();
    let form = AutomorphicForm::new(&group, 4, &[Complex64::new(0.5, 0.2), Complex64::new(0.0, 1.0)], 6).unwrap();
    let z = Octagon::side_point(6, 0.4) * 0.995;
    let g = group.generator(2);
    let a = form.alpha_fast(z).unwrap();
    let b = form.alpha_fast(g.apply(z)).unwrap();
    // The truncated series is automorphic only up to its tail.
    assert!((a - b).abs() < 1e-6 * a, "{a} vs {b}");
}

#[test]
fn tail_shrinks_with_truncation() {
    let group = FuchsianGroup::bolza();
    let coarse = AutomorphicForm::new(&group, 3, &unit_seed(), 3).unwrap();
    let fine = AutomorphicForm::new(&group, 3, &unit_seed(), 5).unwrap();
    assert!(fine.tail_scale() < 0.5 * coarse.tail_scale());
    assert!(fine.element_count() > coarse.element_count());
}

#[test]
fn zero_seed_gives_zero_form() {
    let group = FuchsianGroup::bolza();
    let form = AutomorphicForm::new(&group, 2, &[Complex64::new(0.0, 0.0)], 4).unwrap();
    assert!(form.is_zero());
    assert_eq!(form.alpha_fast(Complex64::new(0.1, 0.1)).unwrap(), 0.0);
    assert_eq!(form.tail_scale(), 0.0);
}

#[test]
fn degree_one_is_rejected() {
    let group = FuchsianGroup::bolza();
    let err = AutomorphicForm::new(&group, 1, &unit_seed(), 3).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("degree 1 is excluded"));
}

fn bump_form(group: &FuchsianGroup) -> CoexactOneForm {
    let bumps = [
        Bump {
            center: [0.25, -0.1],
            width: 1.4,
            amplitude: 0.4,
        },
        Bump {
            center: [-0.3, 0.35],
            width: 1.0,
            amplitude: -0.25,
        },
    ];
    CoexactOneForm::new(group, &bumps, 6).unwrap()
}

#[test]
fn theta_is_deck_invariant_across_a_side() {
    let group = FuchsianGroup::bolza();
    let form = bump_form(&group);
    for (side, t) in [(4, 0.3), (5, 0.5), (7, 0.8)] {
        let z = Octagon::side_point(side, t) * 0.99;
        let g = group.generator(side - 4);
        let phi = 0.7;
        let here = form.theta_jet(z, phi);
        let there = form.theta_jet(g.apply(z), phi + g.derivative(z).arg());
        assert!((here.value - there.value).abs() < 1e-12);
        assert!((here.x - there.x).abs() < 1e-10);
        assert!((here.hv - there.hv).abs() < 1e-10);
    }
}

#[test]
fn theta_is_coclosed() {
    let group = FuchsianGroup::bolza();
    let flow = Flow::new(
        group.clone(),
        Mode::Gaussian {
            oneform: Arc::new(bump_form(&group)),
        },
    );
    for state in random_states(&group, 50, 3) {
        let jet = flow.lambda_jet(&state).unwrap();
        assert!(jet.coclosed_residual().abs() < 1e-10, "{}", jet.coclosed_residual());
        let flipped = flow.lambda_jet(&UnitTangentState::new(state.z, state.phi + std::f64::consts::PI)).unwrap();
        assert!((jet.theta.value + flipped.theta.value).abs() < 1e-12);
    }
}
