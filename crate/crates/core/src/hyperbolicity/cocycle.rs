//! The linearised cocycle `dΨ/dt = −𝔹Ψ` over the flow, with
//! `𝔹 = [[0, −1], [κ, −Vλ]]` in the basis of Jacobi data `(y, ẏ)`.

use crate::dynamics::orbit::{flow_rhs, rk4_step, step_plan};
use crate::dynamics::{CurvatureReport, Flow, UnitTangentState};
use crate::error::Result;
use num_complex::Complex64;

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// Renormalisation threshold on the max-norm.
pub const RENORMALISE_ABOVE: f64 = 1e8;

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn max_norm(a: &Mat2) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

/// Generator `𝔹` from a curvature report.
pub fn generator(report: &CurvatureReport) -> Mat2 {
    [[0.0, -1.0], [report.kappa, -report.v_lambda]]
}

/// `𝔹̃ = P⁻¹𝔹P + P⁻¹FP` for the shear `P = [[1, 0], [p, 1]]`.
pub fn gauge_conjugate(b: &Mat2, p: f64, fp: f64) -> Mat2 {
    let shear = [[1.0, 0.0], [p, 1.0]];
    let inverse = [[1.0, 0.0], [-p, 1.0]];
    let derivative = [[0.0, 0.0], [fp, 0.0]];
    let mut out = mat_mul(&inverse, &mat_mul(b, &shear));
    let extra = mat_mul(&inverse, &derivative);
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += extra[i][j];
        }
    }
    out
}

/// Shear-conjugated generator `[[−p, −1], [κ_p, −Vλ + p]]` at a state.
pub fn conjugated_generator(report: &CurvatureReport) -> Mat2 {
    [[-report.p, -1.0], [report.kappa_p, -report.v_lambda + report.p]]
}

/// Which generator drives the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    Plain,
    Shear,
}

/// How the matrix is updated along the orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Product {
    /// `Ψ′ = −𝔹Ψ` along `F`.
    Cocycle,
    /// `N′ = σN𝔹` with `σ = −1` along `−F` and `σ = +1` along `F`; `N` maps data at the current point back to the start.
    Propagator,
}

/// Cocycle state with log-scale accumulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CocycleFrame {
    pub psi: Mat2,
    pub log_scale: f64,
    pub t: f64,
    /// `∫₀ᵗ Vλ` along the orbit.
    pub integral_v_lambda: f64,
    /// Folded endpoint of the orbit.
    pub end: UnitTangentState,
}

impl CocycleFrame {
    /// `e^{log_scale}Ψ`; overflows for long times.
    pub fn matrix(&self) -> Mat2 {
        let s = self.log_scale.exp();
        self.psi.map(|row| row.map(|v| v * s))
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.log_scale + det(&self.psi).ln()
    }

    /// `|log det Ψ_t − ∫Vλ|`.
    pub fn abel_residual(&self) -> f64 {
        (self.log_det() - self.integral_v_lambda).abs()
    }
}

/// Orbit, matrix and `∫Vλ` advanced together by RK4 with folding.
pub(crate) struct CocycleIntegrator<'a> {
    flow: &'a Flow,
    gauge: Gauge,
    product: Product,
    backward: bool,
    pub state: UnitTangentState,
    pub matrix: Mat2,
    pub log_scale: f64,
    pub integral_v_lambda: f64,
    pub t: f64,
}

impl<'a> CocycleIntegrator<'a> {
    pub fn new(flow: &'a Flow, start: &UnitTangentState, gauge: Gauge, product: Product, backward: bool) -> Self {
        CocycleIntegrator {
            flow,
            gauge,
            product,
            backward,
            state: *start,
            matrix: IDENTITY,
            log_scale: 0.0,
            integral_v_lambda: 0.0,
            t: 0.0,
        }
    }

    fn rhs(&self, y: &[f64; 8]) -> Result<[f64; 8]> {
        let direction = if self.backward { -1.0 } else { 1.0 };
        let (sample, orbit) = flow_rhs(self.flow, &y[..3], direction)?;
        let report = sample.jet.report();
        let b = match self.gauge {
            Gauge::Plain => generator(&report),
            Gauge::Shear => conjugated_generator(&report),
        };
        let m = [[y[3], y[4]], [y[5], y[6]]];
        let d = match self.product {
            Product::Cocycle => {
                let bm = mat_mul(&b, &m);
                bm.map(|row| row.map(|v| -v))
            }
            Product::Propagator => {
                let mb = mat_mul(&m, &b);
                mb.map(|row| row.map(|v| direction * v))
            }
        };
        Ok([
            orbit[0],
            orbit[1],
            orbit[2],
            d[0][0],
            d[0][1],
            d[1][0],
            d[1][1],
            report.v_lambda,
        ])
    }

    /// One RK4 step of size `h`, then fold and renormalise.
    pub fn step(&mut self, h: f64) -> Result<()> {
        let y = [
            self.state.z.re,
            self.state.z.im,
            self.state.phi,
            self.matrix[0][0],
            self.matrix[0][1],
            self.matrix[1][0],
            self.matrix[1][1],
            0.0,
        ];
        let next = rk4_step(&y, h, |y| self.rhs(y))?;
        let state = UnitTangentState::new(Complex64::new(next[0], next[1]), next[2]);
        self.state = self.flow.fold_state(&state)?.0;
        self.matrix = [[next[3], next[4]], [next[5], next[6]]];
        self.integral_v_lambda += next[7];
        self.t += h;
        let norm = max_norm(&self.matrix);
        if norm > RENORMALISE_ABOVE {
            self.matrix = self.matrix.map(|row| row.map(|v| v / norm));
            self.log_scale += norm.ln();
        }
        Ok(())
    }

    /// Advances by `duration` in steps no longer than `dt`.
    pub fn advance(&mut self, duration: f64, dt: f64) -> Result<()> {
        let (steps, h) = step_plan(duration, dt)?;
        for _ in 0..steps {
            self.step(h)?;
        }
        Ok(())
    }

    pub fn frame(&self) -> CocycleFrame {
        CocycleFrame {
            psi: self.matrix,
            log_scale: self.log_scale,
            t: self.t,
            integral_v_lambda: self.integral_v_lambda,
            end: self.state,
        }
    }
}

/// Co-integrates the orbit and `Ψ_t` for time `t`.
pub fn cocycle_integrate(flow: &Flow, start: &UnitTangentState, t: f64, dt: f64) -> Result<CocycleFrame> {
    cocycle_integrate_gauged(flow, start, t, dt, Gauge::Plain)
}

/// As [`cocycle_integrate`] with a choice of generator.
pub fn cocycle_integrate_gauged(flow: &Flow, start: &UnitTangentState, t: f64, dt: f64, gauge: Gauge) -> Result<CocycleFrame> {
    let mut integrator = CocycleIntegrator::new(flow, start, gauge, Product::Cocycle, false);
    integrator.advance(t, dt)?;
    Ok(integrator.frame())
}

/// Exponents from the QR method with unit renormalisation interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovResult {
    pub plus: f64,
    pub minus: f64,
    /// `(λ₊ + λ₋) − (1/T)∫Vλ`.
    pub sum_check: f64,
    /// `(1/T)∫Vλ`.
    pub average_divergence: f64,
    pub t: f64,
}

impl LyapunovResult {
    pub fn sum(&self) -> f64 {
        self.plus + self.minus
    }
}

// Gram–Schmidt on columns: returns Q and the diagonal of R.
fn qr(m: &Mat2) -> (Mat2, [f64; 2]) {
    let c0 = [m[0][0], m[1][0]];
    let c1 = [m[0][1], m[1][1]];
    let r00 = c0[0].hypot(c0[1]);
    let q0 = [c0[0] / r00, c0[1] / r00];
    let r01 = q0[0] * c1[0] + q0[1] * c1[1];
    let w = [c1[0] - r01 * q0[0], c1[1] - r01 * q0[1]];
    let r11 = w[0].hypot(w[1]);
    let q1 = [w[0] / r11, w[1] / r11];
    ([[q0[0], q1[0]], [q0[1], q1[1]]], [r00, r11])
}

pub fn lyapunov_exponents(flow: &Flow, start: &UnitTangentState, t: f64, dt: f64) -> Result<LyapunovResult> {
    lyapunov_exponents_gauged(flow, start, t, dt, Gauge::Plain)
}

pub fn lyapunov_exponents_gauged(flow: &Flow, start: &UnitTangentState, t: f64, dt: f64, gauge: Gauge) -> Result<LyapunovResult> {
    step_plan(t, dt)?;
    let mut integrator = CocycleIntegrator::new(flow, start, gauge, Product::Cocycle, false);
    let mut logs = [0.0; 2];
    let intervals = t.ceil() as usize;
    for k in 0..intervals {
        let length = (t - k as f64).min(1.0);
        integrator.advance(length, dt)?;
        let (q, r) = qr(&integrator.matrix);
        logs[0] += r[0].ln();
        logs[1] += r[1].ln();
        integrator.matrix = q;
    }
    let average_divergence = if t > 0.0 { integrator.integral_v_lambda / t } else { 0.0 };
    let (plus, minus) = if t > 0.0 { (logs[0] / t, logs[1] / t) } else { (0.0, 0.0) };
    Ok(LyapunovResult {
        plus,
        minus,
        sum_check: plus + minus - average_divergence,
        average_divergence,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_conjugation_matches_closed_form() {
        let report = CurvatureReport {
            kappa: -0.7,
            kappa_gauss: 0.0,
            kappa_p: 0.0,
            p: 0.3,
            v_lambda: 0.25,
            curvature: -0.9,
        };
        let fp = -0.4;
        let b = gauge_conjugate(&generator(&report), report.p, fp);
        let kappa_p = report.kappa + fp + report.p * (report.p - report.v_lambda);
        let expected = conjugated_generator(&CurvatureReport { kappa_p, ..report });
        for i in 0..2 {
            for j in 0..2 {
                assert!((b[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
        assert_eq!(gauge_conjugate(&generator(&report), 0.0, 0.0), generator(&report));
    }

    #[test]
    fn qr_reconstructs() {
        let m = [[2.0, -1.0], [0.5, 3.0]];
        let (q, r) = qr(&m);
        assert!((det(&q).abs() - 1.0).abs() < 1e-14);
        assert!((r[0] * r[1] - det(&m).abs()).abs() < 1e-12);
    }
}
