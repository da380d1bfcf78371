//! Derived experiments built on top of the scenario runner: temporal
//! convergence tables, error-growth slopes, and the relaxation-limit
//! comparison between the hyperbolized and the standard Schrödinger flow.

use triwave::{
    ConservationPolicy, ConserveMode, HypNlsModel, HypNlsState, NlsModel, NlsState, SpectralGrid,
    StateOps, Workspace,
};

use crate::run::{complex_initial, march, run_spec, Row, ScenarioResult};
use crate::scenario::{find, resolve_tableau, Overrides, Tier};
use crate::CliError;

/// Least-squares slope of `ln y` against `ln x`.
///
/// Points with a non-finite or non-positive coordinate are dropped.
/// Returns `None` when fewer than three points survive or the abscissas
/// span less than a factor of two, since a fit through such data says
/// nothing about a rate.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite() && *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let x_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if x_max - x_min < std::f64::consts::LN_2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Slope of `ln(l2_error)` against `ln(t - t0)` over rows whose elapsed
/// time falls in `window`.
pub fn error_growth_slope(rows: &[Row], t0: f64, window: (f64, f64)) -> Option<f64> {
    let hi = window.1 * (1.0 + 1e-9) + 1e-12;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let elapsed = r.t - t0;
            (elapsed >= window.0 && elapsed <= hi).then_some((elapsed, r.l2_error))
        })
        .collect();
    log_log_slope(&pts)
}

/// One temporal refinement level of a convergence study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceLevel {
    pub dt: f64,
    pub l2_error: f64,
    pub mean_abs_gamma_dev: f64,
    pub final_time: f64,
}

/// Runs the `kdv-convergence` scenario at `levels` successive halvings of
/// its nominal step size, recording the final error against the tracked
/// fine reference and the mean relaxation deviation per step.
pub fn kdv_convergence_study(
    ws: &mut Workspace,
    levels: usize,
) -> Result<Vec<ConvergenceLevel>, CliError> {
    let scenario = find("kdv-convergence")?;
    let mut out = Vec::with_capacity(levels);
    for i in 0..levels {
        let dt = scenario.dt / f64::powi(2.0, i as i32);
        let spec = scenario.resolve(
            Tier::Ci,
            &Overrides {
                dt: Some(dt),
                ..Overrides::default()
            },
        )?;
        let result = run_spec(&spec, ws, None)?;
        out.push(ConvergenceLevel {
            dt,
            l2_error: result.summary.final_error,
            mean_abs_gamma_dev: result.summary.mean_abs_gamma_dev,
            final_time: result.summary.final_time,
        });
    }
    Ok(out)
}

/// Observed temporal order: slope of final error against step size.
pub fn observed_order(levels: &[ConvergenceLevel]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = levels.iter().map(|l| (l.dt, l.l2_error)).collect();
    log_log_slope(&pts)
}

/// Observed rate of the relaxation deviation: slope of mean `|gamma - 1|`
/// against step size. For an order-`p` scheme this approaches `p - 1`.
pub fn gamma_deviation_order(levels: &[ConvergenceLevel]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .map(|l| (l.dt, l.mean_abs_gamma_dev))
        .collect();
    log_log_slope(&pts)
}

/// Outcome of one policy arm of an error-growth comparison.
pub struct GrowthResult {
    pub mode: ConserveMode,
    pub slope: Option<f64>,
    pub result: ScenarioResult,
}

/// Reruns a scenario under each conservation mode in `modes` and fits the
/// error-growth slope over the elapsed-time `window`.
pub fn error_growth_study(
    ws: &mut Workspace,
    name: &str,
    tier: Tier,
    modes: &[ConserveMode],
    window: (f64, f64),
) -> Result<Vec<GrowthResult>, CliError> {
    let scenario = find(name)?;
    let mut out = Vec::with_capacity(modes.len());
    for &mode in modes {
        let spec = scenario.resolve(
            tier,
            &Overrides {
                conserve: Some(mode),
                ..Overrides::default()
            },
        )?;
        let result = run_spec(&spec, ws, None)?;
        let slope = error_growth_slope(&result.rows, spec.t0, window);
        out.push(GrowthResult {
            mode,
            slope,
            result,
        });
    }
    Ok(out)
}

/// Comparison of the hyperbolized Schrödinger flow against the standard
/// one from identical initial data.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolizationReport {
    pub tau: f64,
    pub steps: usize,
    pub final_time: f64,
    /// Discrete `L^2` distance between the `(v, w)` components of the two
    /// final states.
    pub deviation: f64,
    pub hyp_mass_drift: f64,
    pub hyp_momentum_drift: f64,
    pub hyp_energy_drift: f64,
    pub nls_mass_drift: f64,
    pub nls_energy_drift: f64,
}

fn max_abs(rows: &[Row], pick: impl Fn(&Row) -> f64) -> f64 {
    rows.iter().fold(0.0, |acc, r| acc.max(pick(r).abs()))
}

/// Runs the `hyp-bright` scenario and an otherwise identical run of the
/// standard Schrödinger model, then measures how far the hyperbolized
/// solution strays from the unrelaxed-in-`tau` limit.
pub fn hyperbolization_study(ws: &mut Workspace) -> Result<HyperbolizationReport, CliError> {
    let spec = find("hyp-bright")?.resolve(Tier::Ci, &Overrides::default())?;
    let grid = SpectralGrid::new(spec.xmin, spec.xmax, spec.n)?;
    let tableau = resolve_tableau(&spec.tableau)?;
    let policy = ConservationPolicy::new(spec.conserve);
    let init = complex_initial(spec.initial, spec.t0)?;

    let hyp = HypNlsModel::new(grid, spec.beta, spec.tau);
    let hyp0 = hyp.state_from_fn(ws, &*init)?;
    let mut snap_hyp = |_: &mut Workspace, _: &HypNlsState, _: usize| "not written".to_string();
    let (hyp_rows, _, hyp_final) = march(
        &hyp,
        ws,
        &tableau,
        &policy,
        hyp0,
        spec.t0,
        spec.steps,
        spec.dt,
        spec.cadence,
        None,
        &mut snap_hyp,
    )?;

    let nls = NlsModel::new(grid, spec.beta);
    let nls0 = nls.state_from_fn(ws, &*init)?;
    let mut snap_nls = |_: &mut Workspace, _: &NlsState, _: usize| "not written".to_string();
    let (nls_rows, _, nls_final) = march(
        &nls,
        ws,
        &tableau,
        &policy,
        nls0,
        spec.t0,
        spec.steps,
        spec.dt,
        spec.cadence,
        None,
        &mut snap_nls,
    )?;

    let hyp_vw = NlsState {
        v: hyp_final.v.clone(),
        w: hyp_final.w.clone(),
    };
    Ok(HyperbolizationReport {
        tau: spec.tau,
        steps: spec.steps,
        final_time: hyp_rows.last().map(|r| r.t).unwrap_or(spec.t1),
        deviation: hyp_vw.l2_distance(&nls_final),
        hyp_mass_drift: max_abs(&hyp_rows, |r| r.mass_rel_drift),
        hyp_momentum_drift: max_abs(&hyp_rows, |r| r.momentum_rel_drift),
        hyp_energy_drift: max_abs(&hyp_rows, |r| r.energy_rel_drift),
        nls_mass_drift: max_abs(&nls_rows, |r| r.mass_rel_drift),
        nls_energy_drift: max_abs(&nls_rows, |r| r.energy_rel_drift),
    })
}
