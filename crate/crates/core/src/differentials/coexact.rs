//! Co-closed 1-forms `θ = ⋆dv` from Γ-averaged radial bump potentials.

use crate::dynamics::frame::{frame_parts, Conformal, FrameParts, SectionJet};
use crate::error::{LabError, Result};
use crate::geometry::{hyp_distance_unchecked, FuchsianGroup, Octagon};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `v = amplitude · (1 − q)^5` for `q < 1`, `q = (cosh d − 1)/(cosh width − 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: [f64; 2],
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }
}

/// Value, gradient and Hessian of the potential in the disk chart.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PotentialJet {
    pub v: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub v_xx: f64,
    pub v_xy: f64,
    pub v_yy: f64,
}

impl PotentialJet {
    /// Weight-1 section `2∂_z v = v_x − i v_y` with its chart derivatives.
    pub fn section(&self) -> SectionJet {
        SectionJet {
            value: Complex64::new(self.v_x, -self.v_y),
            dz: Complex64::new(0.5 * (self.v_xx - self.v_yy), -self.v_xy),
            dzbar: Complex64::new(0.5 * (self.v_xx + self.v_yy), 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Translate {
    center: Complex64,
    // 2 / ((1 − |c|²)(cosh w − 1))
    scale: f64,
    amplitude: f64,
}

/// Translates of all bumps whose support can meet the closed octagon
/// enlarged by `EVALUATION_MARGIN`.
#[derive(Clone, Debug)]
pub struct CoexactOneForm {
    bumps: Vec<Bump>,
    truncation: usize,
    translates: Vec<Translate>,
}

/// Hyperbolic margin around the octagon where direct evaluation is exact.
pub const EVALUATION_MARGIN: f64 = 0.5;

impl CoexactOneForm {
    pub fn zero() -> Self {
        CoexactOneForm {
            bumps: Vec::new(),
            truncation: 0,
            translates: Vec::new(),
        }
    }

    pub fn new(group: &FuchsianGroup, bumps: &[Bump], truncation: usize) -> Result<Self> {
        for b in bumps {
            if !(b.width > 0.0) || !(b.center().norm() < 1.0) || !b.amplitude.is_finite() {
                return Err(LabError::Config(format!("invalid bump {b:?}")));
            }
        }
        if bumps.is_empty() {
            return Ok(Self::zero());
        }
        let shells = group.enumerate(truncation)?;
        let origin = Complex64::new(0.0, 0.0);
        let reach = Octagon::circumradius() + EVALUATION_MARGIN;
        let mut translates = Vec::new();
        for (n, shell) in shells.shells().iter().enumerate() {
            for g in shell {
                for b in bumps {
                    let c = g.apply(b.center());
                    if hyp_distance_unchecked(origin, c) <= reach + b.width {
                        if n == truncation && truncation > 0 {
                            return Err(LabError::convergence(
                                format!(
                                    "bump translates still reach the octagon at word length {truncation}"
                                ),
                                Vec::new(),
                            ));
                        }
                        translates.push(Translate {
                            center: c,
                            scale: 2.0 / ((1.0 - c.norm_sqr()) * (b.width.cosh() - 1.0)),
                            amplitude: b.amplitude,
                        });
                    }
                }
            }
        }
        Ok(CoexactOneForm {
            bumps: bumps.to_vec(),
            truncation,
            translates,
        })
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.translates.is_empty()
    }

    /// Potential jet at a point within `EVALUATION_MARGIN` of the octagon.
    pub fn potential_jet(&self, z: Complex64) -> PotentialJet {
        let (x, y) = (z.re, z.im);
        let qz = 1.0 - z.norm_sqr();
        let mut jet = PotentialJet::default();
        for t in &self.translates {
            let dx = x - t.center.re;
            let dy = y - t.center.im;
            let p = dx * dx + dy * dy;
            let q = t.scale * p / qz;
            if q >= 1.0 {
                continue;
            }
            // f = P/Qz and its derivatives, q = scale·f.
            let f_x = 2.0 * dx / qz + 2.0 * x * p / (qz * qz);
            let f_y = 2.0 * dy / qz + 2.0 * y * p / (qz * qz);
            let f_xx = 2.0 / qz + 8.0 * x * dx / (qz * qz) + 2.0 * p / (qz * qz) + 8.0 * x * x * p / qz.powi(3);
            let f_yy = 2.0 / qz + 8.0 * y * dy / (qz * qz) + 2.0 * p / (qz * qz) + 8.0 * y * y * p / qz.powi(3);
            let f_xy = (4.0 * y * dx + 4.0 * x * dy) / (qz * qz) + 8.0 * x * y * p / qz.powi(3);
            let one_minus = 1.0 - q;
            let g0 = t.amplitude * one_minus.powi(5);
            let g1 = -5.0 * t.amplitude * one_minus.powi(4) * t.scale;
            let g2 = 20.0 * t.amplitude * one_minus.powi(3) * t.scale * t.scale;
            jet.v += g0;
            jet.v_x += g1 * f_x;
            jet.v_y += g1 * f_y;
            jet.v_xx += g2 * f_x * f_x + g1 * f_xx;
            jet.v_xy += g2 * f_x * f_y + g1 * f_xy;
            jet.v_yy += g2 * f_y * f_y + g1 * f_yy;
        }
        jet
    }

    /// `θ = ⋆dv` on the unit tangent bundle of the hyperbolic metric at `(z, φ)`,
    /// with `z` in the fundamental domain or its margin.
    pub fn theta_jet(&self, z: Complex64, phi: f64) -> FrameParts {
        if self.is_zero() {
            return FrameParts::default();
        }
        let section = self.potential_jet(z).section();
        frame_parts(1, &section, &Conformal::hyperbolic(z), phi).0
    }
}

/// `θ` and its frame derivatives; `VVθ = −θ` is structural.
pub fn theta_jet(form: &CoexactOneForm, z: Complex64, phi: f64) -> FrameParts {
    form.theta_jet(z, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_derivatives_match_differences() {
        let group = FuchsianGroup::bolza();
        let bumps = [Bump { center: [0.2, -0.1], width: 1.2, amplitude: 0.3 }];
        let form = CoexactOneForm::new(&group, &bumps, 5).unwrap();
        let z = Complex64::new(0.35, 0.1);
        let jet = form.potential_jet(z);
        let h = 1e-5;
        let ex = Complex64::new(h, 0.0);
        let ey = Complex64::new(0.0, h);
        let px = form.potential_jet(z + ex);
        let mx = form.potential_jet(z - ex);
        let py = form.potential_jet(z + ey);
        let my = form.potential_jet(z - ey);
        assert!(((px.v - mx.v) / (2.0 * h) - jet.v_x).abs() < 1e-7);
        assert!(((py.v - my.v) / (2.0 * h) - jet.v_y).abs() < 1e-7);
        assert!(((px.v_x - mx.v_x) / (2.0 * h) - jet.v_xx).abs() < 1e-6);
        assert!(((py.v_x - my.v_x) / (2.0 * h) - jet.v_xy).abs() < 1e-6);
        assert!(((py.v_y - my.v_y) / (2.0 * h) - jet.v_yy).abs() < 1e-6);
    }
}
