//! Limiting Riccati slopes `r^{u,s}` of the invariant bundles over the `(H, V)` frame.
//!
//! In the shear gauge the slope `h = r − p` solves
//! `Fh + h² + h(2p − Vλ) + κ_p = 0`. The unstable slope at `x` is the limit as
//! `R → ∞` of the solution started from `h = +∞` at `φ_{−R}x`; the stable slope
//! uses `h = −∞` at `φ_R x`. Both are read off one propagator per direction.

use super::cocycle::{CocycleIntegrator, Gauge, Mat2, Product};
use crate::dynamics::{Flow, UnitTangentState};
use crate::error::{LabError, Result};
use crate::sampling::halton_states;

/// Finite stand-in for the infinite initial slope.
pub const SLOPE_PROXY: f64 = 1e6;

/// Successive horizons must agree to this tolerance.
pub const RICCATI_TOLERANCE: f64 = 1e-6;

/// Slopes beyond this size mean the solution escaped.
pub const BLOWUP_SLOPE: f64 = 1e8;

pub const DEFAULT_SCHEDULE: [f64; 5] = [4.0, 8.0, 12.0, 16.0, 24.0];

#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiOptions {
    pub schedule: Vec<f64>,
    pub dt: f64,
    pub proxy: f64,
    /// `ℓ` for the lower bound `r_u ≥ ℓ + Va/m`.
    pub ell: Option<f64>,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        RiccatiOptions {
            schedule: DEFAULT_SCHEDULE.to_vec(),
            dt: 1e-2,
            proxy: SLOPE_PROXY,
            ell: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiEstimate {
    pub r_u: f64,
    pub r_s: f64,
    /// Horizon at which both slopes settled.
    pub r_used: f64,
    pub converged: bool,
    /// `r_u − (ℓ + Va/m)` when `ℓ` was supplied.
    pub bound_margin: Option<f64>,
    /// `Vλ − p − κ_p/(r_u − p)`, the alternative unstable-side condition.
    pub alternative_margin: f64,
    /// `(R, r_u, r_s)` at each horizon.
    pub history: Vec<(f64, f64, f64)>,
}

fn slope(n: &Mat2, proxy: f64) -> Result<f64> {
    let top = n[0][0] + n[0][1] * proxy;
    let bottom = n[1][0] + n[1][1] * proxy;
    let h = bottom / top;
    if !h.is_finite() || h.abs() > BLOWUP_SLOPE {
        return Err(LabError::Blowup(format!("Riccati slope escaped to {h:e}")));
    }
    Ok(h)
}

fn slopes_along(flow: &Flow, start: &UnitTangentState, schedule: &[f64], dt: f64, proxy: f64, backward: bool) -> Result<Vec<f64>> {
    let mut integrator = CocycleIntegrator::new(flow, start, Gauge::Shear, Product::Propagator, backward);
    let mut out = Vec::with_capacity(schedule.len());
    let mut reached = 0.0;
    for &r in schedule {
        integrator.advance(r - reached, dt)?;
        reached = r;
        out.push(slope(&integrator.matrix, proxy)?);
    }
    Ok(out)
}

pub fn riccati_limit(flow: &Flow, state: &UnitTangentState, options: &RiccatiOptions) -> Result<RiccatiEstimate> {
    let schedule = &options.schedule;
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] <= 0.0 {
        return Err(LabError::Config("Riccati schedule must be positive and increasing".into()));
    }
    let jet = flow.lambda_jet(state)?;
    let report = jet.report();
    let p = report.p;
    let unstable = slopes_along(flow, state, schedule, options.dt, options.proxy, true)?;
    let stable = slopes_along(flow, state, schedule, options.dt, -options.proxy, false)?;
    let history: Vec<(f64, f64, f64)> = schedule
        .iter()
        .zip(unstable.iter().zip(&stable))
        .map(|(&r, (&hu, &hs))| (r, hu + p, hs + p))
        .collect();
    let settled = (1..history.len()).find(|&i| {
        (history[i].1 - history[i - 1].1).abs() <= RICCATI_TOLERANCE
            && (history[i].2 - history[i - 1].2).abs() <= RICCATI_TOLERANCE
    });
    let (r_used, r_u, r_s) = match settled {
        Some(i) => history[i],
        None => *history.last().expect("schedule is non-empty"),
    };
    let bound_margin = match (options.ell, jet.m) {
        (Some(ell), m) if m >= 2 => Some(r_u - (ell + jet.a.v / f64::from(m))),
        _ => None,
    };
    Ok(RiccatiEstimate {
        r_u,
        r_s,
        r_used,
        converged: settled.is_some(),
        bound_margin,
        alternative_margin: report.v_lambda - p - report.kappa_p / (r_u - p),
        history,
    })
}

/// Sampled `c = max|B|` with `B = ((2−m)/m)Va`, its inflation, and `ℓ = (√(c²+4) − c)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstant {
    pub sampled_max: f64,
    pub c: f64,
    pub ell: f64,
    pub samples: usize,
}

/// Safety factor applied to the sampled maximum of `|B|`.
pub const BOUND_INFLATION: f64 = 1.05;

pub fn bound_constant(flow: &Flow, samples: usize) -> Result<BoundConstant> {
    let m = flow.mode().degree();
    let mut sampled_max: f64 = 0.0;
    if m >= 2 {
        let factor = (2.0 - f64::from(m)) / f64::from(m);
        for state in halton_states(flow.group(), samples) {
            let jet = flow.lambda_jet(&state)?;
            sampled_max = sampled_max.max((factor * jet.a.v).abs());
        }
    }
    let c = BOUND_INFLATION * sampled_max;
    Ok(BoundConstant {
        sampled_max,
        c,
        ell: ((c * c + 4.0).sqrt() - c) / 2.0,
        samples,
    })
}
