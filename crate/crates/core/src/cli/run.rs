//! Pipeline assembly and subcommand dispatch.

use super::config::{ExperimentConfig, ModeName};
use super::format::csv_row;
use crate::diagnostics::{
    curvature_scan, dissipation_report, flatness_eval, l2_identity_check, mean_and_stderr, ScanReport,
};
use crate::differentials::{AutomorphicForm, CoexactOneForm};
use crate::dynamics::{integrate_orbit, Flow, Mode, OrbitOptions, UnitTangentState};
use crate::error::{LabError, Result};
use crate::geometry::FuchsianGroup;
use crate::hyperbolicity::{cone_certificate, lyapunov_exponents, riccati_limit, RiccatiOptions};
use crate::sampling::random_states;
use crate::vortex::{build_mesh, io::write_mesh, nodal_alpha, solve_vortex, ConformalSolution};
use num_complex::Complex64;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Monte Carlo sample count for the L² identity in `report`.
pub const REPORT_MC_SAMPLES: usize = 200_000;

/// Word length for bump translates when the config sets none.
pub const DEFAULT_BUMP_TRUNCATION: usize = 6;

/// Quasi-random points in `scan`.
pub const SCAN_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Solve,
    Orbit,
    Lyapunov,
    Riccati,
    Certify,
    Scan,
    Flatness,
    Report,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Solve => "solve",
            Subcommand::Orbit => "orbit",
            Subcommand::Lyapunov => "lyapunov",
            Subcommand::Riccati => "riccati",
            Subcommand::Certify => "certify",
            Subcommand::Scan => "scan",
            Subcommand::Flatness => "flatness",
            Subcommand::Report => "report",
        }
    }
}

/// Group, flow and solved data for one configuration.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub flow: Flow,
    pub form: Option<Arc<AutomorphicForm>>,
    pub solution: Option<Arc<ConformalSolution>>,
}

impl Experiment {
    pub fn build(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let group = FuchsianGroup::bolza();
        let (mode, form, solution) = match config.mode {
            ModeName::Geodesic => (Mode::Geodesic, None, None),
            ModeName::Gaussian => {
                let truncation = config.truncation.unwrap_or(DEFAULT_BUMP_TRUNCATION);
                let oneform = CoexactOneForm::new(&group, &config.bump_spec, truncation)?;
                (
                    Mode::Gaussian {
                        oneform: Arc::new(oneform),
                    },
                    None,
                    None,
                )
            }
            ModeName::Vortex => {
                let m = config.m;
                let seed: Vec<Complex64> = config.seed_coefficients.iter().map(|c| Complex64::new(c[0], c[1])).collect();
                let form = if seed.iter().all(|c| c.norm() == 0.0) {
                    AutomorphicForm::zero(&group, m)
                } else {
                    let truncation = config.truncation.unwrap_or_else(|| AutomorphicForm::default_truncation(m));
                    AutomorphicForm::new(&group, m, &seed, truncation)?
                };
                let form = Arc::new(form);
                let mesh = Arc::new(build_mesh(&group, config.mesh_h)?);
                let alpha = nodal_alpha(&mesh, &form)?;
                let solution = Arc::new(solve_vortex(&group, mesh, alpha, m, config.solver_tol)?);
                (
                    Mode::Vortex {
                        form: form.clone(),
                        solution: solution.clone(),
                    },
                    Some(form),
                    Some(solution),
                )
            }
        };
        Ok(Experiment {
            config,
            flow: Flow::new(group, mode),
            form,
            solution,
        })
    }

    pub fn states(&self) -> Vec<UnitTangentState> {
        random_states(self.flow.group(), self.config.n_states, self.config.rng_seed)
    }

    /// SHA-256 of the canonical configuration text.
    pub fn config_hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.config.to_json()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// One row of the per-state CSV; unset columns are written as `nan`.
#[derive(Clone, Copy, Debug)]
struct StateRow {
    state: UnitTangentState,
    r_u: f64,
    r_s: f64,
    lyap_plus: f64,
    lyap_minus: f64,
    anosov_margin: f64,
}

const STATES_HEADER: &str = "state_id,re_z,im_z,phi,r_u,r_s,lyap_plus,lyap_minus,anosov_margin\n";

fn states_csv(rows: &[StateRow]) -> String {
    let mut out = String::from(STATES_HEADER);
    for (k, r) in rows.iter().enumerate() {
        let values = [r.state.z.re, r.state.z.im, r.state.phi, r.r_u, r.r_s, r.lyap_plus, r.lyap_minus, r.anosov_margin];
        out.push_str(&format!("{k},{}", csv_row(&values)));
    }
    out
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn write(&mut self, name: String, contents: &str) -> Result<()> {
        fs::write(self.dir.join(&name), contents)?;
        self.written.push(name);
        Ok(())
    }
}

fn json_text(value: &Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn state_rows(experiment: &Experiment, lyapunov: bool, riccati: bool) -> Result<Vec<StateRow>> {
    let flow = &experiment.flow;
    let states = experiment.states();
    let cone = cone_certificate(flow, &states)?;
    let options = RiccatiOptions::default();
    states
        .iter()
        .zip(&cone.entries)
        .map(|(state, entry)| {
            let (lyap_plus, lyap_minus) = if lyapunov {
                let l = lyapunov_exponents(flow, state, experiment.config.t, experiment.config.dt)?;
                (l.plus, l.minus)
            } else {
                (f64::NAN, f64::NAN)
            };
            let (r_u, r_s) = if riccati {
                let r = riccati_limit(flow, state, &options)?;
                (r.r_u, r.r_s)
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok(StateRow {
                state: *state,
                r_u,
                r_s,
                lyap_plus,
                lyap_minus,
                anosov_margin: entry.anosov_margin,
            })
        })
        .collect()
}

fn scan_reports(experiment: &Experiment) -> Result<Vec<ScanReport>> {
    let flow = &experiment.flow;
    let mut reports = Vec::new();
    let samples = crate::sampling::halton_states(flow.group(), SCAN_SAMPLES);
    match (&experiment.form, &experiment.solution) {
        (Some(form), Some(solution)) => reports.push(curvature_scan(solution, form, SCAN_SAMPLES)?),
        _ => {
            let k = samples
                .iter()
                .map(|s| flow.lambda_jet(s).map(|j| j.curvature))
                .collect::<Result<Vec<_>>>()?;
            reports.push(ScanReport::from_values("K_g", &k, 1e-8, |min, max| min >= -1.0 - 1e-8 && max < 0.0));
        }
    }
    let mut kappa_p = Vec::with_capacity(samples.len());
    let mut kappa_gauss = Vec::with_capacity(samples.len());
    for s in &samples {
        let r = flow.kappa_eval(s)?;
        kappa_p.push((r.kappa_p + 1.0).abs());
        kappa_gauss.push(r.kappa_gauss);
    }
    reports.push(ScanReport::from_values("abs(kappa_p+1)", &kappa_p, 1e-4, |_, max| max < 1e-4));
    reports.push(ScanReport::from_values("kappa_gauss", &kappa_gauss, 0.0, |_, max| max < 0.0));
    Ok(reports)
}

fn manifest(experiment: &Experiment, command: Subcommand, written: &[String]) -> Result<Value> {
    let flow = &experiment.flow;
    let residuals = experiment
        .states()
        .iter()
        .map(|s| flow.kappa_eval(s).map(|r| (r.kappa_p + 1.0).abs()))
        .collect::<Result<Vec<_>>>()?;
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
    Ok(json!({
        "command": command.name(),
        "config_sha256": experiment.config_hash()?,
        "mode": flow.mode().name(),
        "m": flow.mode().degree(),
        "n_states": experiment.config.n_states,
        "rng_seed": experiment.config.rng_seed,
        "series_tail_estimate": experiment.form.as_ref().map_or(0.0, |f| f.tail_scale()),
        "pde_residual": experiment.solution.as_ref().map_or(0.0, |s| s.residual_norm()),
        "newton_iterations": experiment.solution.as_ref().map_or(0, |s| s.residual_trace().len()),
        "kappa_p_residual": {"max": max, "mean": mean, "n": residuals.len()},
        "outputs": written,
        "version": env!("CARGO_PKG_VERSION"),
    }))
}

/// Runs one subcommand and writes its outputs and the manifest into `out`.
pub fn run_experiment(experiment: &Experiment, command: Subcommand, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let config = &experiment.config;
    let flow = &experiment.flow;
    let mut outputs = Outputs {
        dir: out.to_path_buf(),
        written: Vec::new(),
    };
    match command {
        Subcommand::Solve => {
            if let Some(solution) = &experiment.solution {
                outputs.write(config.output_name("mesh", "mesh.txt"), &write_mesh(solution.mesh(), Some(solution)))?;
            }
        }
        Subcommand::Orbit => {
            let start = experiment.states()[0];
            let orbit = integrate_orbit(flow, &start, config.t, config.dt, OrbitOptions::default())?;
            let mut text = String::from("t,re_z,im_z,phi,lambda,kappa_p\n");
            for p in &orbit.points {
                text.push_str(&csv_row(&[p.t, p.state.z.re, p.state.z.im, p.state.phi, p.lambda, p.kappa_p]));
            }
            outputs.write(config.output_name("trajectory", "trajectory.csv"), &text)?;
        }
        Subcommand::Lyapunov => {
            let rows = state_rows(experiment, true, false)?;
            outputs.write(config.output_name("states", "states.csv"), &states_csv(&rows))?;
        }
        Subcommand::Riccati => {
            let rows = state_rows(experiment, false, true)?;
            outputs.write(config.output_name("states", "states.csv"), &states_csv(&rows))?;
        }
        Subcommand::Certify => {
            let rows = state_rows(experiment, true, true)?;
            outputs.write(config.output_name("states", "states.csv"), &states_csv(&rows))?;
            let cone = cone_certificate(flow, &experiment.states())?;
            let fold = |f: fn(&StateRow) -> f64, init: f64, pick: fn(f64, f64) -> f64| rows.iter().map(f).fold(init, pick);
            let min_lyap_plus = fold(|r| r.lyap_plus, f64::INFINITY, f64::min);
            let min_r_u = fold(|r| r.r_u, f64::INFINITY, f64::min);
            let max_r_s = fold(|r| r.r_s, f64::NEG_INFINITY, f64::max);
            let certificate = json!({
                "anosov_fraction": cone.anosov_fraction,
                "min_anosov_margin": cone.min_anosov_margin,
                "min_splitting_witness": cone.min_splitting_witness,
                "min_gaussian_witness": cone.min_gaussian_witness,
                "min_lyap_plus": min_lyap_plus,
                "min_r_u": min_r_u,
                "max_r_s": max_r_s,
                "n": rows.len(),
                "pass": min_lyap_plus > 0.0 && min_r_u > 0.0 && max_r_s < 0.0,
            });
            outputs.write(config.output_name("certificate", "certificate.json"), &json_text(&certificate)?)?;
        }
        Subcommand::Scan => {
            let reports = scan_reports(experiment)?;
            outputs.write(config.output_name("scan", "scan.json"), &json_text(&serde_json::to_value(&reports)?)?)?;
        }
        Subcommand::Flatness => {
            let mut text = String::from("state_id,re_z,im_z,phi,a,direct,factored\n");
            for (k, state) in experiment.states().iter().enumerate() {
                let a = flow.lambda_jet(state)?.a.value;
                let f = flatness_eval(flow, state)?;
                text.push_str(&format!("{k},{}", csv_row(&[state.z.re, state.z.im, state.phi, a, f.direct, f.factored])));
            }
            outputs.write(config.output_name("flatness", "flatness.csv"), &text)?;
        }
        Subcommand::Report => {
            let mut sums = Vec::new();
            let mut divergences = Vec::new();
            for state in experiment.states() {
                let d = dissipation_report(flow, &state, config.t, config.dt)?;
                sums.push(d.lyap_sum);
                divergences.push(d.avg_div);
            }
            let (sum_mean, sum_stderr) = mean_and_stderr(&sums);
            let (div_mean, div_stderr) = mean_and_stderr(&divergences);
            let l2 = match flow.mode() {
                Mode::Vortex { .. } => {
                    let l2 = l2_identity_check(flow, REPORT_MC_SAMPLES, config.rng_seed)?;
                    json!({"lhs": l2.lhs, "rhs": l2.rhs, "stderr": l2.stderr, "n": l2.n})
                }
                _ => Value::Null,
            };
            let report = json!({
                "dissipation": {
                    "lyap_sum_mean": sum_mean,
                    "lyap_sum_stderr": sum_stderr,
                    "avg_div_mean": div_mean,
                    "avg_div_stderr": div_stderr,
                    "n": sums.len(),
                },
                "l2_identity": l2,
                "scans": serde_json::to_value(scan_reports(experiment)?)?,
            });
            outputs.write(config.output_name("report", "report.json"), &json_text(&report)?)?;
        }
    }
    let manifest_name = config.output_name("manifest", "manifest.json");
    let manifest = manifest(experiment, command, &outputs.written)?;
    outputs.write(manifest_name, &json_text(&manifest)?)?;
    Ok(outputs.written.iter().map(|n| out.join(n)).collect())
}

/// Reads a config file, applies overrides, and runs.
pub fn run_from_file(
    command: Subcommand,
    config_path: &Path,
    out: &Path,
    states: Option<usize>,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| LabError::Config(format!("cannot read config {}: {e}", config_path.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(n) = states {
        config.n_states = n;
    }
    if let Some(k) = seed {
        config.rng_seed = k;
    }
    let experiment = Experiment::build(config)?;
    run_experiment(&experiment, command, out)
}
