//! Exact arithmetic for the Bolza group.
//!
//! Every element has the form `a = α`, `b = √(1+√2)·β` with `α, β` in the
//! cyclotomic ring `Z[ζ]`, `ζ = e^{iπ/4}`. Composition stays in this form,
//! so word enumeration can deduplicate with exact equality.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// Coefficients of `1, ζ, ζ², ζ³` with `ζ⁴ = −1`.
pub type Cyclo = [i64; 4];

/// `1 + √2 = 1 + ζ − ζ³`.
const SILVER: Cyclo = [1, 1, 0, -1];

fn mul(x: &Cyclo, y: &Cyclo) -> Cyclo {
    let mut r = [0i64; 4];
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0 {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            let k = i + j;
            if k < 4 {
                r[k] += xi * yj;
            } else {
                r[k - 4] -= xi * yj;
            }
        }
    }
    r
}

fn add(x: &Cyclo, y: &Cyclo) -> Cyclo {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]]
}

fn neg(x: &Cyclo) -> Cyclo {
    [-x[0], -x[1], -x[2], -x[3]]
}

/// Complex conjugation: `ζ̄ = −ζ³`, `ζ̄² = −ζ²`, `ζ̄³ = −ζ`.
fn conj(x: &Cyclo) -> Cyclo {
    [x[0], -x[3], -x[2], -x[1]]
}

fn to_complex(x: &Cyclo) -> Complex64 {
    x.iter()
        .enumerate()
        .map(|(k, c)| *c as f64 * Complex64::from_polar(1.0, k as f64 * FRAC_PI_4))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExactElement {
    pub alpha: Cyclo,
    pub beta: Cyclo,
}

impl ExactElement {
    pub const IDENTITY: ExactElement = ExactElement {
        alpha: [1, 0, 0, 0],
        beta: [0, 0, 0, 0],
    };

    /// Side-pairing generator `k` (0..4): `β = √2·ζ^k`.
    pub fn generator(k: usize) -> ExactElement {
        let beta = match k {
            0 => [0, 1, 0, -1],
            1 => [1, 0, 1, 0],
            2 => [0, 1, 0, 1],
            3 => [-1, 0, 1, 0],
            _ => panic!("generator index {k} out of range"),
        };
        ExactElement {
            alpha: SILVER,
            beta,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ExactElement) -> ExactElement {
        let alpha = add(
            &mul(&self.alpha, &other.alpha),
            &mul(&SILVER, &mul(&self.beta, &conj(&other.beta))),
        );
        let beta = add(
            &mul(&self.alpha, &other.beta),
            &mul(&self.beta, &conj(&other.alpha)),
        );
        ExactElement { alpha, beta }
    }

    pub fn inverse(&self) -> ExactElement {
        ExactElement {
            alpha: conj(&self.alpha),
            beta: neg(&self.beta),
        }
    }

    /// Representative of `±self` with the first nonzero coefficient of `α` positive.
    pub fn canonical(self) -> ExactElement {
        let lead = self.alpha.iter().find(|c| **c != 0).copied().unwrap_or(0);
        if lead < 0 {
            ExactElement {
                alpha: neg(&self.alpha),
                beta: neg(&self.beta),
            }
        } else {
            self
        }
    }

    /// `|a|² − |b|²` evaluated in the ring; equals `[1, 0, 0, 0]` for group elements.
    pub fn determinant(&self) -> Cyclo {
        let aa = mul(&self.alpha, &conj(&self.alpha));
        let bb = mul(&SILVER, &mul(&self.beta, &conj(&self.beta)));
        add(&aa, &neg(&bb))
    }

    pub fn to_float(&self) -> (Complex64, Complex64) {
        let scale = (1.0 + std::f64::consts::SQRT_2).sqrt();
        (to_complex(&self.alpha), to_complex(&self.beta) * scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_have_unit_determinant() {
        for k in 0..4 {
            let g = ExactElement::generator(k);
            assert_eq!(g.determinant(), [1, 0, 0, 0]);
            assert_eq!(g.compose(&g.inverse()).canonical(), ExactElement::IDENTITY);
        }
    }

    #[test]
    fn float_image_matches_closed_form() {
        let (a, b) = ExactElement::generator(1).to_float();
        let expected_b = Complex64::from_polar((2.0 + 2.0 * 2f64.sqrt()).sqrt(), FRAC_PI_4);
        assert!((a - Complex64::new(1.0 + 2f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!((b - expected_b).norm() < 1e-14);
    }

    #[test]
    fn composition_matches_float_product() {
        let g = ExactElement::generator(0).compose(&ExactElement::generator(2).inverse());
        let (a, b) = g.to_float();
        let (a1, b1) = ExactElement::generator(0).to_float();
        let (a2, b2) = ExactElement::generator(2).inverse().to_float();
        let a_ref = a1 * a2 + b1 * b2.conj();
        let b_ref = a1 * b2 + b1 * a2.conj();
        assert!((a - a_ref).norm() < 1e-12);
        assert!((b - b_ref).norm() < 1e-12);
        assert_eq!(g.determinant(), [1, 0, 0, 0]);
    }
}
