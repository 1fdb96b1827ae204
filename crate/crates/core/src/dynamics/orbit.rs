//! Fixed-step RK4 integration of the flow with folding.

use super::{Flow, Sample, UnitTangentState};
use crate::error::{LabError, Result};
use crate::geometry::GroupElement;
use num_complex::Complex64;

/// One classical RK4 step for `ẏ = f(y)`.
pub fn rk4_step<const N: usize>(
    y: &[f64; N],
    dt: f64,
    mut f: impl FnMut(&[f64; N]) -> Result<[f64; N]>,
) -> Result<[f64; N]> {
    let shifted = |k: &[f64; N], c: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = f(y)?;
    let k2 = f(&shifted(&k1, 0.5 * dt))?;
    let k3 = f(&shifted(&k2, 0.5 * dt))?;
    let k4 = f(&shifted(&k3, dt))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Orbit state `(x, y, φ)` with its `F`-velocity scaled by `direction`.
pub(crate) fn flow_rhs(flow: &Flow, y: &[f64], direction: f64) -> Result<(Sample, [f64; 3])> {
    let sample = flow.sample(Complex64::new(y[0], y[1]), y[2])?;
    let (dz, dphi) = sample.velocity(y[2]);
    Ok((sample, [direction * dz.re, direction * dz.im, direction * dphi]))
}

/// Group element applied after step `step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldEvent {
    pub step: usize,
    pub element: GroupElement,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: UnitTangentState,
    pub lambda: f64,
    pub kappa_p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitOptions {
    /// Fold after every step.
    pub fold: bool,
    /// Record every `stride`-th step; 0 records only the endpoints.
    pub stride: usize,
    /// Integrate `−F` instead of `F`.
    pub backward: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            fold: true,
            stride: 1,
            backward: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub points: Vec<TrajectoryPoint>,
    pub folds: Vec<FoldEvent>,
    pub end: UnitTangentState,
}

impl Orbit {
    /// Product of all fold elements, mapping the unfolded endpoint to `end`.
    pub fn total_fold(&self) -> GroupElement {
        self.folds
            .iter()
            .fold(GroupElement::IDENTITY, |acc, e| e.element.compose(&acc))
    }

    /// Endpoint on the universal cover.
    pub fn unfolded_end(&self) -> UnitTangentState {
        self.end.transform(&self.total_fold().inverse())
    }
}

/// Number of fixed steps covering `[0, t]`, with the step shortened to fit exactly.
pub(crate) fn step_plan(t: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !(t >= 0.0) || !t.is_finite() {
        return Err(LabError::Config(format!("need dt > 0 and T ≥ 0, got dt = {dt}, T = {t}")));
    }
    let n = (t / dt).ceil() as usize;
    Ok((n, if n == 0 { 0.0 } else { t / n as f64 }))
}

/// Integrates `F` (or `−F`) for time `t` from `start`.
pub fn integrate_orbit(flow: &Flow, start: &UnitTangentState, t: f64, dt: f64, options: OrbitOptions) -> Result<Orbit> {
    let (steps, h) = step_plan(t, dt)?;
    let direction = if options.backward { -1.0 } else { 1.0 };
    let mut folds = Vec::new();
    let mut points = Vec::new();
    let mut state = *start;
    let record = |state: &UnitTangentState, time: f64, points: &mut Vec<TrajectoryPoint>| -> Result<()> {
        let jet = flow.lambda_jet(state)?;
        points.push(TrajectoryPoint {
            t: time,
            state: *state,
            lambda: jet.lambda(),
            kappa_p: jet.report().kappa_p,
        });
        Ok(())
    };
    record(&state, 0.0, &mut points)?;
    for step in 1..=steps {
        let y = rk4_step(&[state.z.re, state.z.im, state.phi], h, |y| Ok(flow_rhs(flow, y, direction)?.1))?;
        state = UnitTangentState::new(Complex64::new(y[0], y[1]), y[2]);
        if options.fold {
            let (folded, g) = flow.fold_state(&state)?;
            if !g.is_identity(1e-14) {
                folds.push(FoldEvent { step, element: g });
            }
            state = folded;
        }
        let time = direction * step as f64 * h;
        if step == steps || (options.stride > 0 && step % options.stride == 0) {
            record(&state, time, &mut points)?;
        }
    }
    Ok(Orbit {
        points,
        folds,
        end: state,
    })
}
