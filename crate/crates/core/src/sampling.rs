//! Deterministic point and state samplers.

use crate::dynamics::UnitTangentState;
use crate::geometry::{FuchsianGroup, Octagon};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the octagon in Euclidean coordinates, by rejection.
pub fn octagon_point<R: Rng>(group: &FuchsianGroup, rng: &mut R) -> Complex64 {
    let r = Octagon::vertex_radius();
    loop {
        let z = Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if z.norm() < r && group.in_domain(z, 0.0) {
            return z;
        }
    }
}

/// States uniform in Euclidean area on the octagon and uniform in angle.
pub fn random_states(group: &FuchsianGroup, n: usize, seed: u64) -> Vec<UnitTangentState> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let z = octagon_point(group, &mut rng);
            UnitTangentState::new(z, rng.gen_range(0.0..TAU))
        })
        .collect()
}

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += f * (index % base) as f64;
        index /= base;
        f /= base as f64;
    }
    result
}

/// Quasi-random states: Halton sequence in (x, y, φ), octagon points kept.
pub fn halton_states(group: &FuchsianGroup, n: usize) -> Vec<UnitTangentState> {
    let r = Octagon::vertex_radius();
    let mut out = Vec::with_capacity(n);
    let mut index = 1u64;
    while out.len() < n {
        let z = Complex64::new(
            (2.0 * radical_inverse(index, 2) - 1.0) * r,
            (2.0 * radical_inverse(index, 3) - 1.0) * r,
        );
        let phi = TAU * radical_inverse(index, 5);
        index += 1;
        if z.norm() < r && group.in_domain(z, 0.0) {
            out.push(UnitTangentState::new(z, phi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(4, 2), 0.125);
    }

    #[test]
    fn samplers_stay_in_domain() {
        let group = FuchsianGroup::bolza();
        for s in random_states(&group, 200, 3).iter().chain(halton_states(&group, 200).iter()) {
            assert!(group.in_domain(s.z, 0.0));
            assert!((0.0..TAU).contains(&s.phi));
        }
    }
}
