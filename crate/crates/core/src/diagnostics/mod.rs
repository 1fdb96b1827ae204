//! Global scans and identity checks: curvature bounds, dissipation, the
//! vortex L² identity and the flatness functional.

use crate::differentials::AutomorphicForm;
use crate::dynamics::{Flow, Mode, UnitTangentState};
use crate::error::{LabError, Result};
use crate::hyperbolicity::lyapunov_exponents;
use crate::sampling::{halton_states, random_states};
use crate::vortex::{curvature_eval, ConformalSolution};
use serde::{Deserialize, Serialize};

/// Lower slack allowed below `K = −1`.
pub const CURVATURE_TOLERANCE: f64 = 1e-8;

/// The Monte Carlo error must stay below this fraction of `|rhs|`.
pub const MAX_RELATIVE_STDERR: f64 = 0.1;

/// Summary statistics of one scanned quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub quantity: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub n: usize,
    pub pass: bool,
    pub tolerance: f64,
}

impl ScanReport {
    /// Statistics of `values`; `pass` is decided from `(min, max)` alone.
    pub fn from_values(quantity: &str, values: &[f64], tolerance: f64, pass: impl Fn(f64, f64) -> bool) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = if values.is_empty() {
            f64::NAN
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        };
        ScanReport {
            quantity: quantity.to_string(),
            min,
            max,
            mean: mean.clamp(min.min(max), max.max(min)),
            n: values.len(),
            pass: !values.is_empty() && pass(min, max),
            tolerance,
        }
    }

    /// JSON object with keys in sorted order.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)?)
    }
}

/// Scans the algebraic curvature at `n` quasi-random folded points.
pub fn curvature_scan(solution: &ConformalSolution, form: &AutomorphicForm, n: usize) -> Result<ScanReport> {
    let values = halton_states(form.group(), n)
        .iter()
        .map(|s| curvature_eval(solution, form, s.z).map(|(k, _)| k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport::from_values("K_g", &values, CURVATURE_TOLERANCE, |min, max| {
        min >= -1.0 - CURVATURE_TOLERANCE && max < 0.0
    }))
}

/// The flatness functional by two routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flatness {
    /// `(3/2)λ + (5/3)VVλ + (1/6)VVVVλ` from the frame jet.
    pub direct: f64,
    /// `(1/6)(m−1)(m+1)(m−3)(m+3)a`.
    pub factored: f64,
}

impl Flatness {
    pub fn discrepancy(&self) -> f64 {
        (self.direct - self.factored).abs()
    }
}

/// `(1/6)(m−1)(m+1)(m−3)(m+3)`.
pub fn flatness_factor(m: u32) -> f64 {
    let m = f64::from(m);
    (m - 1.0) * (m + 1.0) * (m - 3.0) * (m + 3.0) / 6.0
}

pub fn flatness_eval(flow: &Flow, state: &UnitTangentState) -> Result<Flatness> {
    let jet = flow.lambda_jet(state)?;
    let direct = 1.5 * jet.lambda() + (5.0 / 3.0) * jet.vv_lambda() + jet.vvvv_lambda() / 6.0;
    // The θ part of λ contributes (3/2 − 5/3 + 1/6)(−Vθ) = 0.
    let factored = if jet.m >= 2 { flatness_factor(jet.m) * jet.a.value } else { 0.0 };
    Ok(Flatness { direct, factored })
}

/// Volume growth along one orbit, by divergence and by Lyapunov exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dissipation {
    /// `(1/T)∫Vλ`.
    pub avg_div: f64,
    /// `λ₊ + λ₋`.
    pub lyap_sum: f64,
}

pub fn dissipation_report(flow: &Flow, state: &UnitTangentState, t: f64, dt: f64) -> Result<Dissipation> {
    let lyapunov = lyapunov_exponents(flow, state, t, dt)?;
    Ok(Dissipation {
        avg_div: lyapunov.average_divergence,
        lyap_sum: lyapunov.sum(),
    })
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Both sides of `2⟨H_c a, VFa⟩ = ‖Fa‖² + ‖H_c a‖² + ‖Va‖²` per unit of sampling measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L2Identity {
    pub lhs: f64,
    pub rhs: f64,
    /// Standard error of `lhs − rhs`.
    pub stderr: f64,
    pub n: usize,
}

impl L2Identity {
    /// `|lhs − rhs|` in units of the standard error.
    pub fn sigmas(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.stderr
    }
}

/// Monte Carlo check of the vortex L² identity with test function `u = a`.
///
/// States are uniform in Euclidean area on the octagon and in angle; each is
/// weighted by the `g`-area density `e^{2s}`, so the means are integrals
/// against the Liouville volume up to a common constant.
pub fn l2_identity_check(flow: &Flow, n_mc: usize, seed: u64) -> Result<L2Identity> {
    if n_mc < 2 {
        return Err(LabError::Config("l2_identity_check needs at least two samples".into()));
    }
    let m = match flow.mode() {
        Mode::Vortex { form, .. } => f64::from(form.m()),
        Mode::Geodesic => {
            return Ok(L2Identity {
                lhs: 0.0,
                rhs: 0.0,
                stderr: 0.0,
                n: n_mc,
            })
        }
        Mode::Gaussian { .. } => {
            return Err(LabError::Domain("the L² identity is implemented for the vortex family".into()))
        }
    };
    let (mut sum_l, mut sum_r) = (0.0, 0.0);
    let (mut mean_d, mut m2_d) = (0.0, 0.0);
    for (k, state) in random_states(flow.group(), n_mc, seed).iter().enumerate() {
        let sample = flow.sample(state.z, state.phi)?;
        let a = sample.jet.a;
        let weight = (2.0 * sample.conformal.s).exp();
        let c = a.v / m;
        let fa = a.x + a.value * a.v;
        let hca = a.h + c * a.v;
        // VX = XV + H and VVa = −m²a.
        let vfa = a.xv + a.h + a.v * a.v - m * m * a.value * a.value;
        let l = weight * 2.0 * hca * vfa;
        let r = weight * (fa * fa + hca * hca + a.v * a.v);
        sum_l += l;
        sum_r += r;
        // Welford update for the difference.
        let d = l - r;
        let delta = d - mean_d;
        mean_d += delta / (k + 1) as f64;
        m2_d += delta * (d - mean_d);
    }
    let n = n_mc as f64;
    let result = L2Identity {
        lhs: sum_l / n,
        rhs: sum_r / n,
        stderr: (m2_d / (n - 1.0) / n).sqrt(),
        n: n_mc,
    };
    if result.stderr > MAX_RELATIVE_STDERR * result.rhs.abs() {
        return Err(LabError::Statistical(format!(
            "standard error {:e} exceeds {MAX_RELATIVE_STDERR} of |rhs| = {:e}",
            result.stderr,
            result.rhs.abs()
        )));
    }
    Ok(result)
}
