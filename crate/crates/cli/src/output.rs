//! CSV and JSON writers. Rows are written with a fixed 16-digit
//! scientific format so reruns of the same configuration produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use triwave::{ConservationPolicy, ConserveMode};

use crate::run::{Row, ScenarioResult};
use crate::scenario::RunSpec;
use crate::CliError;

pub const CSV_HEADER: &str = "t,mass_rel_drift,momentum_rel_drift,energy_rel_drift,l2_error,gamma";

pub fn conserve_name(mode: ConserveMode) -> &'static str {
    match mode {
        ConserveMode::None => "none",
        ConserveMode::MassEnergy => "mass-energy",
        ConserveMode::MassMomentumEnergy => "full",
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Stable hex digest of every parameter that influences a run.
pub fn scenario_hash(spec: &RunSpec) -> String {
    let canonical = format!(
        "{}|{}|{:e}|{:e}|{}|{:e}|{:e}|{:e}|{}|{}|{}|{:e}|{:e}|{:?}|{}|{}|{}",
        spec.name,
        spec.equation.name(),
        spec.xmin,
        spec.xmax,
        spec.n,
        spec.dt,
        spec.t0,
        spec.t1,
        spec.steps,
        spec.tableau,
        conserve_name(spec.conserve),
        spec.beta,
        spec.tau,
        spec.initial,
        spec.reference.name(),
        spec.cadence,
        spec.tier.name(),
    );
    format!("{:016x}", fnv1a(canonical.as_bytes()))
}

/// Run metadata stored next to the CSV (or inline in JSON output).
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub scenario: String,
    pub equation: &'static str,
    pub tier: &'static str,
    pub initial_data: String,
    pub reference: &'static str,
    pub conserve: &'static str,
    pub tableau: String,
    pub n_modes: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub dt: f64,
    pub t0: f64,
    pub t_final_nominal: f64,
    pub steps: usize,
    pub cadence: usize,
    pub beta: f64,
    pub tau: f64,
    pub relax_tol: f64,
    pub newton_tol: f64,
    pub scenario_hash: String,
    pub wall_seconds: f64,
    pub rows_written: usize,
    pub final_time: f64,
    pub final_error: Option<f64>,
    pub max_mass_drift: f64,
    pub max_momentum_drift: f64,
    pub max_energy_drift: f64,
    pub error_growth_slope: Option<f64>,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub mean_abs_gamma_dev: f64,
    pub total_root_evaluations: usize,
    pub max_root_evaluations: usize,
    pub degenerate_relaxations: usize,
}

pub fn build_sidecar(spec: &RunSpec, result: &ScenarioResult) -> Sidecar {
    let policy = ConservationPolicy::new(spec.conserve);
    let s = &result.summary;
    Sidecar {
        scenario: spec.name.clone(),
        equation: spec.equation.name(),
        tier: spec.tier.name(),
        initial_data: format!("{:?}", spec.initial),
        reference: spec.reference.name(),
        conserve: conserve_name(spec.conserve),
        tableau: spec.tableau.clone(),
        n_modes: spec.n,
        xmin: spec.xmin,
        xmax: spec.xmax,
        dt: spec.dt,
        t0: spec.t0,
        t_final_nominal: spec.t1,
        steps: spec.steps,
        cadence: spec.cadence,
        beta: spec.beta,
        tau: spec.tau,
        relax_tol: policy.relax_tol,
        newton_tol: policy.newton_tol,
        scenario_hash: scenario_hash(spec),
        wall_seconds: s.wall_seconds,
        rows_written: result.rows.len(),
        final_time: s.final_time,
        final_error: s.final_error.is_finite().then_some(s.final_error),
        max_mass_drift: s.max_mass_drift,
        max_momentum_drift: s.max_momentum_drift,
        max_energy_drift: s.max_energy_drift,
        error_growth_slope: s.error_growth_slope,
        gamma_min: s.gamma_min,
        gamma_max: s.gamma_max,
        mean_abs_gamma_dev: s.mean_abs_gamma_dev,
        total_root_evaluations: s.total_root_evaluations,
        max_root_evaluations: s.max_root_evaluations,
        degenerate_relaxations: s.degenerate_relaxations,
    }
}

fn write_file(path: &Path, body: String) -> Result<(), CliError> {
    fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let mut body = String::with_capacity(rows.len() * 160 + CSV_HEADER.len() + 1);
    body.push_str(CSV_HEADER);
    body.push('\n');
    for r in rows {
        let _ = writeln!(
            body,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.mass_rel_drift, r.momentum_rel_drift, r.energy_rel_drift, r.l2_error, r.gamma
        );
    }
    write_file(path, body)
}

#[derive(Serialize)]
struct RowOut {
    t: f64,
    mass_rel_drift: f64,
    momentum_rel_drift: f64,
    energy_rel_drift: f64,
    l2_error: Option<f64>,
    gamma: f64,
}

#[derive(Serialize)]
struct Document<'a> {
    #[serde(flatten)]
    meta: &'a Sidecar,
    rows: Vec<RowOut>,
}

pub fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(sidecar).expect("sidecar serializes");
    body.push('\n');
    write_file(path, body)
}

pub fn write_json(path: &Path, sidecar: &Sidecar, rows: &[Row]) -> Result<(), CliError> {
    let rows = rows
        .iter()
        .map(|r| RowOut {
            t: r.t,
            mass_rel_drift: r.mass_rel_drift,
            momentum_rel_drift: r.momentum_rel_drift,
            energy_rel_drift: r.energy_rel_drift,
            l2_error: r.l2_error.is_finite().then_some(r.l2_error),
            gamma: r.gamma,
        })
        .collect();
    let doc = Document {
        meta: sidecar,
        rows,
    };
    let mut body = serde_json::to_string_pretty(&doc).expect("document serializes");
    body.push('\n');
    write_file(path, body)
}
