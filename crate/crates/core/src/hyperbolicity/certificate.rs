//! Conjugate points and pointwise cone certificates.

use super::cocycle::generator;
use crate::dynamics::orbit::{flow_rhs, rk4_step, step_plan};
use crate::dynamics::{Flow, UnitTangentState};
use crate::error::Result;
use num_complex::Complex64;

/// Bisection stops once the bracket is this short.
pub const ZERO_TIME_TOLERANCE: f64 = 1e-12;

// First sign change of component `index` in (0, T], refined by bisection on a partial RK4 step.
fn first_zero<const N: usize>(
    start: [f64; N],
    t: f64,
    dt: f64,
    index: usize,
    mut rhs: impl FnMut(&[f64; N]) -> Result<[f64; N]>,
    mut settle: impl FnMut([f64; N]) -> Result<[f64; N]>,
) -> Result<Option<f64>> {
    let (steps, h) = step_plan(t, dt)?;
    let mut y = start;
    for k in 0..steps {
        let next = rk4_step(&y, h, &mut rhs)?;
        let crossed = next[index] == 0.0 || (y[index] != 0.0 && next[index].signum() != y[index].signum());
        if crossed && (k > 0 || next[index] != 0.0) {
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > ZERO_TIME_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                let probe = rk4_step(&y, mid, &mut rhs)?;
                if probe[index] == 0.0 || probe[index].signum() != y[index].signum() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(k as f64 * h + 0.5 * (lo + hi)));
        }
        y = settle(next)?;
    }
    Ok(None)
}

/// First `t ∈ (0, T]` where the Jacobi solution with `y(0) = 0`, `ẏ(0) = 1` vanishes.
pub fn conjugate_point_scan(flow: &Flow, state: &UnitTangentState, t: f64, dt: f64) -> Result<Option<f64>> {
    let start = [state.z.re, state.z.im, state.phi, 0.0, 1.0];
    first_zero(
        start,
        t,
        dt,
        3,
        |y| {
            let (sample, orbit) = flow_rhs(flow, &y[..3], 1.0)?;
            let b = generator(&sample.jet.report());
            let (j, dj) = (y[3], y[4]);
            Ok([
                orbit[0],
                orbit[1],
                orbit[2],
                -(b[0][0] * j + b[0][1] * dj),
                -(b[1][0] * j + b[1][1] * dj),
            ])
        },
        |mut y| {
            let state = UnitTangentState::new(Complex64::new(y[0], y[1]), y[2]);
            let folded = flow.fold_state(&state)?.0;
            y[0] = folded.z.re;
            y[1] = folded.z.im;
            y[2] = folded.phi;
            Ok(y)
        },
    )
}

/// Conjugate-point scan for given coefficients `t ↦ (κ(t), Vλ(t))` of `ÿ − Vλẏ + κy = 0`.
pub fn conjugate_point_scan_with(coefficients: impl Fn(f64) -> (f64, f64), t: f64, dt: f64) -> Result<Option<f64>> {
    first_zero(
        [0.0, 0.0, 1.0],
        t,
        dt,
        1,
        |y| {
            let (kappa, v_lambda) = coefficients(y[0]);
            Ok([1.0, y[2], v_lambda * y[2] - kappa * y[1]])
        },
        Ok,
    )
}

/// Pointwise certificate data at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeEntry {
    pub state: UnitTangentState,
    pub kappa_p: f64,
    pub kappa_gauss: f64,
    pub v_lambda: f64,
    /// `min Q̇` on `{zy = 0}` of the unit circle, `min(1, −κ_p)`.
    pub splitting_witness: f64,
    /// `−(κ_p + (Vλ)²/4)`.
    pub anosov_margin: f64,
    /// `min Q̇` on `{(ẏ − Vλy)y = 0}` of the unit circle, `min(1, −𝕂/(1 + (Vλ)²))`.
    pub gaussian_witness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeReport {
    pub entries: Vec<ConeEntry>,
    /// Fraction of states with positive Anosov margin.
    pub anosov_fraction: f64,
    pub min_splitting_witness: f64,
    pub min_anosov_margin: f64,
    pub min_gaussian_witness: f64,
}

pub fn cone_certificate(flow: &Flow, states: &[UnitTangentState]) -> Result<ConeReport> {
    let entries = states
        .iter()
        .map(|state| {
            let report = flow.kappa_eval(state)?;
            let vl = report.v_lambda;
            Ok(ConeEntry {
                state: *state,
                kappa_p: report.kappa_p,
                kappa_gauss: report.kappa_gauss,
                v_lambda: vl,
                splitting_witness: 1f64.min(-report.kappa_p),
                anosov_margin: -(report.kappa_p + vl * vl / 4.0),
                gaussian_witness: 1f64.min(-report.kappa_gauss / (1.0 + vl * vl)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let positive = entries.iter().filter(|e| e.anosov_margin > 0.0).count();
    let min = |f: fn(&ConeEntry) -> f64| entries.iter().map(f).fold(f64::INFINITY, f64::min);
    Ok(ConeReport {
        anosov_fraction: if entries.is_empty() { 0.0 } else { positive as f64 / entries.len() as f64 },
        min_splitting_witness: min(|e| e.splitting_witness),
        min_anosov_margin: min(|e| e.anosov_margin),
        min_gaussian_witness: min(|e| e.gaussian_witness),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_curvature_zero_at_pi() {
        let zero = conjugate_point_scan_with(|_| (1.0, 0.0), 10.0, 1e-3).unwrap().unwrap();
        assert!((zero - std::f64::consts::PI).abs() < 1e-6, "{zero}");
        assert_eq!(conjugate_point_scan_with(|_| (-1.0, 0.0), 50.0, 1e-3).unwrap(), None);
    }
}
