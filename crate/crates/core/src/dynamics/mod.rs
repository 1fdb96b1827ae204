//! Thermostat flows `F = X + λV` on the unit tangent bundle.
//!
//! Every evaluation folds the base point into the fundamental octagon and
//! carries the direction along with `dγ`; frame derivatives are invariant
//! under the deck group, so jets are computed at the folded state.

pub mod frame;
pub mod orbit;

pub use frame::{Conformal, FrameParts, SectionJet};
pub use orbit::{integrate_orbit, rk4_step, FoldEvent, Orbit, OrbitOptions, TrajectoryPoint};

use crate::differentials::{AutomorphicForm, CoexactOneForm};
use crate::error::{LabError, Result};
use crate::geometry::{FuchsianGroup, GroupElement, EPS_BOUNDARY};
use crate::vortex::ConformalSolution;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Point of the unit tangent bundle: base point and Euclidean direction angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitTangentState {
    pub z: Complex64,
    pub phi: f64,
}

impl UnitTangentState {
    pub fn new(z: Complex64, phi: f64) -> Self {
        Self {
            z,
            phi: phi.rem_euclid(TAU),
        }
    }

    /// `(z, φ + π)`.
    pub fn flip(&self) -> Self {
        Self::new(self.z, self.phi + std::f64::consts::PI)
    }

    /// Image under a deck transformation.
    pub fn transform(&self, g: &GroupElement) -> Self {
        Self::new(g.apply(self.z), self.phi + g.derivative(self.z).arg())
    }
}

/// Which member of the thermostat family to run.
#[derive(Clone, Debug)]
pub enum Mode {
    /// `λ = 0` on the hyperbolic metric.
    Geodesic,
    /// `λ = a` for a degree-`m` differential on `g = e^{2u}g₀`.
    Vortex {
        form: Arc<AutomorphicForm>,
        solution: Arc<ConformalSolution>,
    },
    /// `λ = −Vθ` on the hyperbolic metric with `θ = ⋆dv`.
    Gaussian { oneform: Arc<CoexactOneForm> },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Geodesic => "geodesic",
            Mode::Vortex { .. } => "vortex",
            Mode::Gaussian { .. } => "gaussian",
        }
    }

    /// Degree of the differential, 0 when there is none.
    pub fn degree(&self) -> u32 {
        match self {
            Mode::Vortex { form, .. } => form.m(),
            _ => 0,
        }
    }
}

/// Frame jets of `a` and `θ`, from which every derivative of `λ = a − Vθ` follows.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LambdaJet {
    pub m: u32,
    pub a: FrameParts,
    pub theta: FrameParts,
    /// Gaussian curvature of `g`, algebraic route.
    pub curvature: f64,
}

impl LambdaJet {
    pub fn lambda(&self) -> f64 {
        self.a.value - self.theta.v
    }

    pub fn v_lambda(&self) -> f64 {
        self.a.v + self.theta.value
    }

    /// Uses `VVa = −m²a` and `VVθ = −θ`.
    pub fn vv_lambda(&self) -> f64 {
        let m = f64::from(self.m);
        -m * m * self.a.value + self.theta.v
    }

    /// `V⁴λ = m⁴a − Vθ`.
    pub fn vvvv_lambda(&self) -> f64 {
        let m2 = f64::from(self.m * self.m);
        m2 * m2 * self.a.value - self.theta.v
    }

    pub fn x_lambda(&self) -> f64 {
        self.a.x - self.theta.xv
    }

    pub fn h_lambda(&self) -> f64 {
        self.a.h - self.theta.hv
    }

    pub fn xv_lambda(&self) -> f64 {
        self.a.xv + self.theta.x
    }

    pub fn hv_lambda(&self) -> f64 {
        self.a.hv + self.theta.h
    }

    /// `FVλ = XVλ + λVVλ`.
    pub fn fv_lambda(&self) -> f64 {
        self.xv_lambda() + self.lambda() * self.vv_lambda()
    }

    /// Gauge `p = Va/m + θ`.
    pub fn p(&self) -> f64 {
        let va_m = if self.m == 0 { 0.0 } else { self.a.v / f64::from(self.m) };
        va_m + self.theta.value
    }

    /// `Fp = XVa/m + Xθ + λ(−ma + Vθ)`.
    pub fn fp(&self) -> f64 {
        let (xva_m, vp_a) = if self.m == 0 {
            (0.0, 0.0)
        } else {
            let m = f64::from(self.m);
            (self.a.xv / m, -m * self.a.value)
        };
        xva_m + self.theta.x + self.lambda() * (vp_a + self.theta.v)
    }

    /// `κ = K − Hλ + λ²`.
    pub fn kappa(&self) -> f64 {
        let l = self.lambda();
        self.curvature - self.h_lambda() + l * l
    }

    /// `|A|²_g = a² + (Va/m)²`.
    pub fn a_norm_sqr(&self) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        let va_m = self.a.v / f64::from(self.m);
        self.a.value * self.a.value + va_m * va_m
    }

    /// `XVa − mHa` from the chart jet: a multiple of the supplied `∂_z̄Θ`, so it
    /// vanishes by construction for series data. Measure it by differencing instead.
    pub fn holomorphy_residual(&self) -> f64 {
        self.a.xv - f64::from(self.m) * self.a.h
    }

    /// Co-closedness residual `Xθ + HVθ`.
    pub fn coclosed_residual(&self) -> f64 {
        self.theta.x + self.theta.hv
    }

    pub fn report(&self) -> CurvatureReport {
        let kappa = self.kappa();
        let p = self.p();
        let v_lambda = self.v_lambda();
        CurvatureReport {
            kappa,
            kappa_gauss: kappa + self.fv_lambda(),
            kappa_p: kappa + self.fp() + p * (p - v_lambda),
            p,
            v_lambda,
            curvature: self.curvature,
        }
    }
}

/// `κ`, `𝕂 = κ + FVλ`, `κ_p = κ + Fp + p(p − Vλ)` and their inputs at a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureReport {
    pub kappa: f64,
    pub kappa_gauss: f64,
    pub kappa_p: f64,
    pub p: f64,
    pub v_lambda: f64,
    pub curvature: f64,
}

/// Everything the integrators need at one chart point.
#[derive(Clone, Copy, Debug)]
pub struct Sample {
    /// Conformal data in the chart of the unfolded point.
    pub conformal: Conformal,
    pub jet: LambdaJet,
}

impl Sample {
    /// Chart velocity of `F = X + λV`.
    pub fn velocity(&self, phi: f64) -> (Complex64, f64) {
        let (dz, dphi) = self.conformal.geodesic_velocity(phi);
        (dz, dphi + self.jet.lambda())
    }
}

/// A thermostat flow on the Bolza surface.
#[derive(Clone, Debug)]
pub struct Flow {
    group: FuchsianGroup,
    mode: Mode,
}

impl Flow {
    pub fn new(group: FuchsianGroup, mode: Mode) -> Self {
        Flow { group, mode }
    }

    pub fn geodesic(group: FuchsianGroup) -> Self {
        Self::new(group, Mode::Geodesic)
    }

    pub fn group(&self) -> &FuchsianGroup {
        &self.group
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    /// Folds a state into the octagon.
    pub fn fold_state(&self, state: &UnitTangentState) -> Result<(UnitTangentState, GroupElement)> {
        let (w, g) = self.group.fold(state.z)?;
        Ok((UnitTangentState::new(w, state.phi + g.derivative(state.z).arg()), g))
    }

    /// Evaluates conformal data in the chart of `z` and the jet at `(z, φ)`.
    pub fn sample(&self, z: Complex64, phi: f64) -> Result<Sample> {
        if !(z.norm() < 1.0 - EPS_BOUNDARY) {
            return Err(LabError::Step(format!("point {z} left the disk before folding")));
        }
        let (w, g) = self.group.fold(z)?;
        let d = g.derivative(z);
        let phi_w = phi + d.arg();
        let hyperbolic = Conformal::hyperbolic(w);
        let (conf_w, a) = match &self.mode {
            Mode::Vortex { form, solution } => {
                let u = solution.eval_local(w)?;
                let conf = Conformal::with_factor(w, u.u, u.u_x, u.u_y);
                let (value, dz) = form.fast_eval(w)?;
                let jet = SectionJet {
                    value,
                    dz,
                    dzbar: Complex64::new(0.0, 0.0),
                };
                (conf, frame::frame_parts(form.m() as i32, &jet, &conf, phi_w).0)
            }
            _ => (hyperbolic, FrameParts::default()),
        };
        let theta = match &self.mode {
            Mode::Gaussian { oneform } => oneform.theta_jet(w, phi_w),
            _ => FrameParts::default(),
        };
        let m = self.mode.degree();
        let mut jet = LambdaJet {
            m,
            a,
            theta,
            curvature: -1.0,
        };
        if m >= 2 {
            jet.curvature = -1.0 + f64::from(m - 1) * jet.a_norm_sqr();
        }
        // s(z) = s(w) + log|γ′(z)| and ∂_z s(z) = ∂_w s(w)γ′(z) + γ″/(2γ′).
        let s_z = conf_w.s_z() * d + g.second_derivative(z) / (2.0 * d);
        let conformal = Conformal {
            s: conf_w.s + d.norm().ln(),
            s_x: 2.0 * s_z.re,
            s_y: -2.0 * s_z.im,
        };
        Ok(Sample { conformal, jet })
    }

    pub fn lambda_jet(&self, state: &UnitTangentState) -> Result<LambdaJet> {
        Ok(self.sample(state.z, state.phi)?.jet)
    }

    pub fn kappa_eval(&self, state: &UnitTangentState) -> Result<CurvatureReport> {
        Ok(self.lambda_jet(state)?.report())
    }
}

/// Free-function form of [`Flow::lambda_jet`].
pub fn lambda_jet(flow: &Flow, state: &UnitTangentState) -> Result<LambdaJet> {
    flow.lambda_jet(state)
}

/// Free-function form of [`Flow::kappa_eval`].
pub fn kappa_eval(flow: &Flow, state: &UnitTangentState) -> Result<CurvatureReport> {
    flow.kappa_eval(state)
}
