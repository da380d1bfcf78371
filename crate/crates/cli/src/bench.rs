//! Wall-clock benchmark cases with pinned grids, step sizes, and spans.

use std::time::Instant;

use serde::Serialize;
use triwave::{
    nls_bright, ArkTableau, BbmModel, BbmSolitary, ConservationPolicy, NlsModel, Projectable,
    SpectralGrid, StateOps, Workspace, NLS_BRIGHT_BETA,
};

use crate::run::{complex_closed_form, march, real_closed_form};
use crate::scenario::InitialData;
use crate::CliError;

/// Timing and accuracy record of one benchmark case.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub case: String,
    pub equation: &'static str,
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub runs: usize,
    pub seconds: Vec<f64>,
    pub median_seconds: f64,
    pub final_l2_error: f64,
    /// Wall-time budget the case is expected to stay under on commodity
    /// hardware; advisory, not enforced by the runner.
    pub soft_time_bound_seconds: Option<f64>,
    /// Published wall time of the run this case mirrors.
    pub comparison_seconds: Option<f64>,
    /// Published final error of the scheme this case is compared against.
    pub comparison_error: Option<f64>,
}

struct TimedOutcome<S> {
    seconds: Vec<f64>,
    final_state: S,
    final_time: f64,
}

#[allow(clippy::too_many_arguments)]
fn timed<M: Projectable>(
    model: &M,
    ws: &mut Workspace,
    tableau: &ArkTableau,
    policy: &ConservationPolicy,
    u0: &M::State,
    steps: usize,
    dt: f64,
    runs: usize,
) -> Result<TimedOutcome<M::State>, CliError> {
    let mut snap = |_: &mut Workspace, _: &M::State, _: usize| "not written".to_string();
    let (_, _, mut final_state) = march(
        model,
        ws,
        tableau,
        policy,
        u0.clone(),
        0.0,
        steps,
        dt,
        steps,
        None,
        &mut snap,
    )?;
    let mut final_time = steps as f64 * dt;
    let mut seconds = Vec::with_capacity(runs);
    for _ in 0..runs {
        let start = Instant::now();
        let (rows, _, state) = march(
            model,
            ws,
            tableau,
            policy,
            u0.clone(),
            0.0,
            steps,
            dt,
            steps,
            None,
            &mut snap,
        )?;
        seconds.push(start.elapsed().as_secs_f64());
        final_time = rows.last().map(|r| r.t).unwrap_or(final_time);
        final_state = state;
    }
    Ok(TimedOutcome {
        seconds,
        final_state,
        final_time,
    })
}

fn median(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[sorted.len() / 2]
}

/// Runs a named benchmark case: one warmup pass, then three timed passes,
/// reporting the median wall time and the final closed-form error of the
/// last pass.
pub fn perf_bench(case: &str, ws: &mut Workspace) -> Result<BenchReport, CliError> {
    const RUNS: usize = 3;
    match case {
        "bbm-s5" => {
            let grid = SpectralGrid::new(-50.0, 50.0, 100)?;
            let model = BbmModel::new(grid);
            let c = 0.5 * (1.0 + 5f64.sqrt());
            let wave = BbmSolitary::new(0.0, c);
            let u0 = model.state_from_fn(ws, |x| wave.eval(0.0, x))?;
            let tableau = ArkTableau::ark548();
            let policy = ConservationPolicy::full();
            let dt = 0.5;
            let steps = 40_000;
            let outcome = timed(&model, ws, &tableau, &policy, &u0, steps, dt, RUNS)?;
            let form = real_closed_form(InitialData::BbmSolitary { x0: 0.0, c }, grid.length())
                .expect("solitary wave has a closed form");
            let exact = model.state_from_fn(ws, |x| form(outcome.final_time, x))?;
            Ok(BenchReport {
                case: case.to_string(),
                equation: "bbm",
                n: grid.n(),
                dt,
                steps,
                final_time: outcome.final_time,
                runs: RUNS,
                median_seconds: median(&outcome.seconds),
                seconds: outcome.seconds,
                final_l2_error: outcome.final_state.l2_distance(&exact),
                soft_time_bound_seconds: Some(5.0),
                comparison_seconds: Some(0.40),
                comparison_error: None,
            })
        }
        "nls-s5" => {
            let grid = SpectralGrid::new(-40.0, 40.0, 1024)?;
            let model = NlsModel::new(grid, NLS_BRIGHT_BETA);
            let u0 = model.state_from_fn(ws, |x| nls_bright(0.0, x))?;
            let tableau = ArkTableau::ark548();
            let policy = ConservationPolicy::full();
            let dt = 1.0 / 512.0;
            let steps = 512;
            let outcome = timed(&model, ws, &tableau, &policy, &u0, steps, dt, RUNS)?;
            let form = complex_closed_form(InitialData::NlsBright, grid.length())
                .expect("bright soliton has a closed form");
            let exact = model.state_from_fn(ws, |x| form(outcome.final_time, x))?;
            Ok(BenchReport {
                case: case.to_string(),
                equation: "nls",
                n: grid.n(),
                dt,
                steps,
                final_time: outcome.final_time,
                runs: RUNS,
                median_seconds: median(&outcome.seconds),
                seconds: outcome.seconds,
                final_l2_error: outcome.final_state.l2_distance(&exact),
                soft_time_bound_seconds: None,
                comparison_seconds: None,
                comparison_error: Some(1.26e-6),
            })
        }
        other => Err(CliError::UnknownBenchCase(other.to_string())),
    }
}
