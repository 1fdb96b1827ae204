//! Conformal coordinates on the unit tangent bundle and the frame `X, H, V`.
//!
//! With `g = e^{2s}|dz|²` and `φ` the Euclidean direction angle,
//! `X = e^{−s}(cos φ ∂x + sin φ ∂y + (−s_x sin φ + s_y cos φ)∂φ)`,
//! `H = e^{−s}(−sin φ ∂x + cos φ ∂y − (s_x cos φ + s_y sin φ)∂φ)`, `V = ∂φ`.

use crate::geometry::GroupElement;
use num_complex::Complex64;

/// Total conformal exponent `s` and its gradient at a chart point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conformal {
    pub s: f64,
    pub s_x: f64,
    pub s_y: f64,
}

impl Conformal {
    /// The hyperbolic metric `4|dz|²/(1−|z|²)²`.
    pub fn hyperbolic(z: Complex64) -> Self {
        let q = 1.0 - z.norm_sqr();
        Conformal {
            s: (2.0 / q).ln(),
            s_x: 2.0 * z.re / q,
            s_y: 2.0 * z.im / q,
        }
    }

    /// `e^{2u}` times the hyperbolic metric.
    pub fn with_factor(z: Complex64, u: f64, u_x: f64, u_y: f64) -> Self {
        let h = Self::hyperbolic(z);
        Conformal {
            s: h.s + u,
            s_x: h.s_x + u_x,
            s_y: h.s_y + u_y,
        }
    }

    /// `∂_z s = (s_x − i s_y)/2`.
    pub fn s_z(&self) -> Complex64 {
        Complex64::new(self.s_x, -self.s_y) * 0.5
    }

    /// Velocity `(ẋ + iẏ, φ̇)` of the field `X`.
    pub fn geodesic_velocity(&self, phi: f64) -> (Complex64, f64) {
        let scale = (-self.s).exp();
        let (sin, cos) = phi.sin_cos();
        (
            Complex64::new(cos, sin) * scale,
            scale * (-self.s_x * sin + self.s_y * cos),
        )
    }

    /// Velocity of the field `H`.
    pub fn horizontal_velocity(&self, phi: f64) -> (Complex64, f64) {
        let scale = (-self.s).exp();
        let (sin, cos) = phi.sin_cos();
        (
            Complex64::new(-sin, cos) * scale,
            -scale * (self.s_x * cos + self.s_y * sin),
        )
    }
}

/// Chart data of a weight-`m` section: `Θ`, `∂_zΘ`, `∂_z̄Θ`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SectionJet {
    pub value: Complex64,
    pub dz: Complex64,
    pub dzbar: Complex64,
}

impl SectionJet {
    /// Data at `z` from data at `w = γz`, using `Θ(z) = Θ(γz)γ′(z)^m`.
    pub fn pull_back(&self, m: i32, g: &GroupElement, z: Complex64) -> SectionJet {
        let d1 = g.derivative(z);
        let d2 = g.second_derivative(z);
        let dm = d1.powi(m);
        SectionJet {
            value: self.value * dm,
            dz: self.dz * dm * d1 + self.value * f64::from(m) * d1.powi(m - 1) * d2,
            dzbar: self.dzbar * dm * d1.conj(),
        }
    }
}

/// Frame derivatives of `f = Im ã` with `ã = Θ e^{−ms} e^{imφ}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrameParts {
    pub value: f64,
    pub v: f64,
    pub x: f64,
    pub h: f64,
    pub xv: f64,
    pub hv: f64,
}

/// Returns the frame derivatives of `Im ã` and the complex value `ã`.
pub fn frame_parts(m: i32, jet: &SectionJet, conf: &Conformal, phi: f64) -> (FrameParts, Complex64) {
    let mf = f64::from(m);
    let e_iphi = Complex64::from_polar(1.0, phi);
    let weight = Complex64::from_polar((-mf * conf.s).exp(), mf * phi);
    let tilde = jet.value * weight;
    let shrink = (-conf.s).exp();
    let drift = 2.0 * mf * conf.s_z() * e_iphi * tilde;
    let plus = e_iphi * jet.dz;
    let minus = e_iphi.conj() * jet.dzbar;
    let x_tilde = shrink * ((plus + minus) * weight - drift);
    let h_tilde = shrink * Complex64::i() * ((plus - minus) * weight - drift);
    (
        FrameParts {
            value: tilde.im,
            v: mf * tilde.re,
            x: x_tilde.im,
            h: h_tilde.im,
            xv: mf * x_tilde.re,
            hv: mf * h_tilde.re,
        },
        tilde,
    )
}
