use num_complex::Complex64;
use proptest::prelude::*;
use thermolab::geometry::{hyp_distance, FuchsianGroup, GroupElement, Octagon};

fn word(group: &FuchsianGroup, letters: &[usize]) -> GroupElement {
    letters.iter().fold(GroupElement::IDENTITY, |acc, &k| acc.compose(group.generator(k)))
}

#[test]
fn surface_relator_is_trivial() {
    let group = FuchsianGroup::bolza();
    // g0 g1⁻¹ g2 g3⁻¹ g0⁻¹ g1 g2⁻¹ g3, inverses at index k + 4.
    assert!(word(&group, &[0, 5, 2, 7, 4, 1, 6, 3]).is_identity(1e-10));
    assert!(!word(&group, &[0, 1, 2, 3, 4, 5, 6, 7]).is_identity(1e-6));
}

#[test]
fn generators_are_orientation_preserving_isometries() {
    let group = FuchsianGroup::bolza();
    let p = Complex64::new(0.2, -0.1);
    let q = Complex64::new(-0.3, 0.25);
    for g in group.generators() {
        assert!((g.determinant() - 1.0).abs() < 1e-12);
        let d0 = hyp_distance(p, q).unwrap();
        let d1 = hyp_distance(g.apply(p), g.apply(q)).unwrap();
        assert!((d0 - d1).abs() < 1e-10);
        assert!(g.compose(&g.inverse()).is_identity(1e-12));
    }
}

#[test]
fn sphere_sizes_match_surface_group_growth() {
    // Growth series of the genus-2 surface group in the standard generators.
    let shells = FuchsianGroup::bolza().enumerate(5).unwrap();
    let sizes: Vec<usize> = shells.shells().iter().map(Vec::len).collect();
    assert_eq!(sizes, [1, 8, 56, 392, 2736, 19096]);
}

#[test]
fn element_cap_is_a_resource_error() {
    let group = FuchsianGroup::bolza().with_element_cap(100);
    let err = group.enumerate(3).unwrap_err();
    assert_eq!(err.exit_code(), 5);
}

#[test]
fn octagon_interior_maps_outside() {
    let group = FuchsianGroup::bolza();
    let shells = group.enumerate(2).unwrap();
    let inner = Complex64::from_polar(0.6 * Octagon::vertex_radius(), 0.4);
    assert!(group.in_domain(inner, 0.0));
    for g in shells.iter().skip(1) {
        assert!(!group.in_domain(g.apply(inner), 1e-12));
    }
}

#[test]
fn octagon_has_area_four_pi() {
    // Gauss–Bonnet for genus 2; Monte Carlo over the bounding square with the hyperbolic density.
    let group = FuchsianGroup::bolza();
    let r = Octagon::vertex_radius();
    let n = 400;
    let mut area = 0.0;
    for i in 0..n {
        for j in 0..n {
            let z = Complex64::new(-r + 2.0 * r * (i as f64 + 0.5) / n as f64, -r + 2.0 * r * (j as f64 + 0.5) / n as f64);
            if group.in_domain(z, 0.0) {
                area += 4.0 / (1.0 - z.norm_sqr()).powi(2);
            }
        }
    }
    area *= (2.0 * r / n as f64).powi(2);
    assert!((area / (4.0 * std::f64::consts::PI) - 1.0).abs() < 5e-3, "{area}");
}

proptest! {
    #[test]
    fn fold_lands_in_domain(r in 0.0f64..0.995, t in 0.0f64..std::f64::consts::TAU) {
        let group = FuchsianGroup::bolza();
        let z = Complex64::from_polar(r, t);
        let (w, g) = group.fold(z).unwrap();
        prop_assert!(group.in_domain(w, 1e-9));
        prop_assert!((g.apply(z) - w).norm() < 1e-9 * (1.0 + 1.0 / (1.0 - r)));
    }

    #[test]
    fn fold_is_invariant_under_the_group(r in 0.0f64..0.7, t in 0.0f64..std::f64::consts::TAU, k in 0usize..8, l in 0usize..8) {
        let group = FuchsianGroup::bolza();
        let z = Complex64::from_polar(r, t);
        let moved = group.generator(k).compose(group.generator(l)).apply(z);
        let (w0, _) = group.fold(z).unwrap();
        let (w1, _) = group.fold(moved).unwrap();
        // Boundary points have two representatives; compare distances to the centre there.
        let same = (w0 - w1).norm() < 1e-8;
        let paired = (w0.norm() - w1.norm()).abs() < 1e-8 && group.in_domain(w0, 1e-8) && !group.in_domain(w0, -1e-8);
        prop_assert!(same || paired, "{} vs {}", w0, w1);
    }
}
