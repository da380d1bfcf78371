//! Scenario runner: integrates a resolved spec, logging invariant drifts,
//! discrete `L^2` errors against the configured reference, and the
//! relaxation history at the configured cadence.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use triwave::{
    fine_reference, nls_bright, relax_step, BbmModel, BbmSolitary, BbmState, ConservationPolicy,
    HypNlsModel, HypNlsState, KdvModel, KdvSolitons, KdvState, ModalField, NlsGrayOne, NlsGrayTwo,
    NlsModel, NlsState, Projectable, SpectralGrid, StateOps, Workspace, GRAY_ONE_HALF_WIDTH,
    REFERENCE_DT_DIVISOR, REFERENCE_MODE_FACTOR,
};

use crate::scenario::{resolve_tableau, Equation, InitialData, Reference, RunSpec};
use crate::studies::error_growth_slope;
use crate::CliError;

/// One output record. Drifts are relative to the invariants at the start
/// of the run; `l2_error` is NaN when the scenario has no reference;
/// `gamma` is the relaxation parameter of the step that produced the row.
#[derive(Debug, Clone, Copy)]
pub struct Row {
    pub t: f64,
    pub mass_rel_drift: f64,
    pub momentum_rel_drift: f64,
    pub energy_rel_drift: f64,
    pub l2_error: f64,
    pub gamma: f64,
}

/// Aggregates of a completed run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    pub wall_seconds: f64,
    pub final_time: f64,
    pub final_error: f64,
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

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub rows: Vec<Row>,
    pub summary: RunSummary,
}

pub(crate) struct MarchStats {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub abs_gamma_dev_sum: f64,
    pub total_root_evaluations: usize,
    pub max_root_evaluations: usize,
    pub degenerate_relaxations: usize,
}

type RefFn<'a, S> = dyn FnMut(&mut Workspace, f64) -> Result<S, CliError> + 'a;
type SnapFn<'a, S> = dyn FnMut(&mut Workspace, &S, usize) -> String + 'a;

/// Core stepping loop shared by scenarios, studies, and benchmarks.
///
/// Advances `steps` relaxed steps of nominal size `dt` from `(t0, u0)`,
/// tracking the relaxed time `t += gamma * dt`. A row is recorded at the
/// start, every `cadence` steps, and at the final step. The reference
/// callback, when present, is queried at the row's relaxed time.
#[allow(clippy::too_many_arguments)]
pub(crate) fn march<M: Projectable>(
    model: &M,
    ws: &mut Workspace,
    tableau: &triwave::ArkTableau,
    policy: &ConservationPolicy,
    u0: M::State,
    t0: f64,
    steps: usize,
    dt: f64,
    cadence: usize,
    mut reference: Option<&mut RefFn<'_, M::State>>,
    snapshot: &mut SnapFn<'_, M::State>,
) -> Result<(Vec<Row>, MarchStats, M::State), CliError> {
    let cadence = cadence.max(1);
    let inv0 = model.invariants(ws, &u0)?;
    let d_mass = inv0.mass.abs().max(1e-8);
    let d_momentum = inv0.momentum.abs().max(1e-8);
    let d_energy = inv0.energy.abs().max(1e-8);

    let mut u = u0;
    let mut t = t0;
    let mut rows = Vec::with_capacity(steps / cadence + 2);
    let err0 = match reference.as_deref_mut() {
        Some(f) => u.l2_distance(&f(ws, t)?),
        None => f64::NAN,
    };
    rows.push(Row {
        t,
        mass_rel_drift: 0.0,
        momentum_rel_drift: 0.0,
        energy_rel_drift: 0.0,
        l2_error: err0,
        gamma: 1.0,
    });

    let mut stats = MarchStats {
        gamma_min: f64::INFINITY,
        gamma_max: f64::NEG_INFINITY,
        abs_gamma_dev_sum: 0.0,
        total_root_evaluations: 0,
        max_root_evaluations: 0,
        degenerate_relaxations: 0,
    };

    for step in 1..=steps {
        let out = match relax_step(model, ws, tableau, dt, &u, policy) {
            Ok(out) => out,
            Err(source) => {
                let snapshot = snapshot(ws, &u, step);
                return Err(CliError::Numerical {
                    step,
                    source,
                    snapshot,
                });
            }
        };
        u = out.state;
        t += out.gamma * dt;
        stats.gamma_min = stats.gamma_min.min(out.gamma);
        stats.gamma_max = stats.gamma_max.max(out.gamma);
        stats.abs_gamma_dev_sum += (out.gamma - 1.0).abs();
        stats.total_root_evaluations += out.root_evaluations;
        stats.max_root_evaluations = stats.max_root_evaluations.max(out.root_evaluations);
        if out.degenerate {
            stats.degenerate_relaxations += 1;
        }

        if step % cadence == 0 || step == steps {
            let inv = model.invariants(ws, &u)?;
            if !(inv.mass.is_finite() && inv.momentum.is_finite() && inv.energy.is_finite()) {
                let snapshot = snapshot(ws, &u, step);
                return Err(CliError::NonFinite { step, t, snapshot });
            }
            let err = match reference.as_deref_mut() {
                Some(f) => u.l2_distance(&f(ws, t)?),
                None => f64::NAN,
            };
            rows.push(Row {
                t,
                mass_rel_drift: (inv.mass - inv0.mass) / d_mass,
                momentum_rel_drift: (inv.momentum - inv0.momentum) / d_momentum,
                energy_rel_drift: (inv.energy - inv0.energy) / d_energy,
                l2_error: err,
                gamma: out.gamma,
            });
        }
    }

    if !stats.gamma_min.is_finite() {
        stats.gamma_min = 1.0;
        stats.gamma_max = 1.0;
    }
    Ok((rows, stats, u))
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Representative of `x` modulo the domain length nearest the crest, so a
/// closed form whose pulse has left the window is evaluated on the
/// periodic image that re-entered from the other side.
pub(crate) fn wrap_offset(x: f64, crest: f64, length: f64) -> f64 {
    x - ((x - crest) / length).round() * length
}

/// Two bright pulses with opposite group velocities, colliding mid-run.
pub(crate) fn two_bright(x: f64) -> Complex64 {
    Complex64::from_polar(sech(x - 10.0), -2.0 * x)
        + Complex64::from_polar(1.2 * sech(1.2 * (x + 10.0)), x)
}

/// Three bright pulses with distinct speeds and phases.
pub(crate) fn three_bright(x: f64) -> Complex64 {
    Complex64::from_polar(0.9 * sech(0.9 * (x + 15.0)), 2.0 * x)
        + Complex64::from_polar(1.1 * sech(1.1 * x), -0.5 * x)
        + Complex64::from_polar(sech(x - 15.0), -2.0 * x)
}

pub(crate) fn real_initial(
    init: InitialData,
    t0: f64,
) -> Result<Box<dyn Fn(f64) -> f64>, CliError> {
    match init {
        InitialData::BbmTwoWave => Ok(Box::new(move |x| triwave::bbm_two_wave(t0, x))),
        InitialData::BbmSolitary { x0, c } => {
            let wave = BbmSolitary::new(x0, c);
            Ok(Box::new(move |x| wave.eval(t0, x)))
        }
        InitialData::KdvSingle { k, x0 } => {
            let wave = KdvSolitons::new(vec![k], vec![x0]);
            Ok(Box::new(move |x| wave.eval(t0, x)))
        }
        InitialData::KdvTwo => {
            let wave = KdvSolitons::two_soliton();
            Ok(Box::new(move |x| wave.eval(t0, x)))
        }
        InitialData::KdvThree => {
            let wave = KdvSolitons::three_soliton();
            Ok(Box::new(move |x| wave.eval(t0, x)))
        }
        other => Err(CliError::InvalidConfig(format!(
            "initial data {other:?} is complex-valued"
        ))),
    }
}

pub(crate) fn complex_initial(
    init: InitialData,
    t0: f64,
) -> Result<Box<dyn Fn(f64) -> Complex64>, CliError> {
    match init {
        InitialData::NlsBright => Ok(Box::new(move |x| nls_bright(t0, x))),
        InitialData::NlsTwoBright => Ok(Box::new(two_bright)),
        InitialData::NlsThreeBright => Ok(Box::new(three_bright)),
        InitialData::NlsGrayOne => {
            let wave = NlsGrayOne::standard();
            Ok(Box::new(move |x| wave.eval(t0, x)))
        }
        InitialData::NlsGrayTwo => {
            let wave = NlsGrayTwo::standard();
            Ok(Box::new(move |x| wave.eval(t0, x)))
        }
        other => Err(CliError::InvalidConfig(format!(
            "initial data {other:?} is real-valued"
        ))),
    }
}

/// Closed-form solution for real-valued initial data, periodized onto the
/// run's domain. Returns `None` when the initial data is not itself an
/// exact solution (superposed waves are initial data only).
pub(crate) fn real_closed_form(
    init: InitialData,
    length: f64,
) -> Option<Box<dyn Fn(f64, f64) -> f64>> {
    match init {
        InitialData::BbmSolitary { x0, c } => {
            let wave = BbmSolitary::new(x0, c);
            Some(Box::new(move |t, x| {
                wave.eval(t, wrap_offset(x, x0 + c * t, length))
            }))
        }
        InitialData::KdvSingle { k, x0 } => {
            let wave = KdvSolitons::new(vec![k], vec![x0]);
            let speed = k * k;
            Some(Box::new(move |t, x| {
                wave.eval(t, wrap_offset(x, x0 + speed * t, length))
            }))
        }
        InitialData::KdvTwo => Some(periodized_kdv(KdvSolitons::two_soliton(), length)),
        InitialData::KdvThree => Some(periodized_kdv(KdvSolitons::three_soliton(), length)),
        _ => None,
    }
}

fn periodized_kdv(wave: KdvSolitons, length: f64) -> Box<dyn Fn(f64, f64) -> f64> {
    Box::new(move |t, x| wave.eval(t, x - length) + wave.eval(t, x) + wave.eval(t, x + length))
}

/// Closed-form solution for complex-valued initial data, periodized onto
/// the run's domain.
pub(crate) fn complex_closed_form(
    init: InitialData,
    length: f64,
) -> Option<Box<dyn Fn(f64, f64) -> Complex64>> {
    match init {
        InitialData::NlsBright => Some(Box::new(move |t, x| {
            nls_bright(t, wrap_offset(x, -4.0 * t, length))
        })),
        InitialData::NlsGrayOne => {
            let wave = NlsGrayOne::standard();
            debug_assert!((length - 2.0 * GRAY_ONE_HALF_WIDTH).abs() < 1e-9);
            Some(Box::new(move |t, x| {
                wave.eval_periodic(0.5 * length, t, x)
            }))
        }
        InitialData::NlsGrayTwo => {
            let wave = NlsGrayTwo::standard();
            Some(Box::new(move |t, x| wave.eval(t, x)))
        }
        _ => None,
    }
}

/// Exact restriction of a finer modal field onto a coarser grid over the
/// same domain: shared wavenumbers are copied, the rest is dropped.
pub(crate) fn truncate_field(fine: &ModalField, grid: SpectralGrid) -> ModalField {
    let mut out = ModalField::zeros(grid);
    for j in 0..grid.dof() {
        out.set_coeff(j, fine.coeff(j));
    }
    out
}

fn write_snapshot(
    dir: Option<&Path>,
    name: &str,
    step: usize,
    ws: &mut Workspace,
    grid: SpectralGrid,
    fields: &[(&str, &ModalField)],
) -> String {
    let Some(dir) = dir else {
        return "not written".to_string();
    };
    let mut header = String::from("x");
    let mut columns = Vec::with_capacity(fields.len());
    for (label, field) in fields {
        header.push(',');
        header.push_str(label);
        match ws.evaluate(field, grid.n()) {
            Ok(values) => columns.push(values),
            Err(e) => return format!("not written ({e})"),
        }
    }
    let mut body = header;
    body.push('\n');
    for (i, &x) in grid.nodes().iter().enumerate() {
        let _ = write!(body, "{x:.16e}");
        for col in &columns {
            let _ = write!(body, ",{:.16e}", col[i]);
        }
        body.push('\n');
    }
    let path = dir.join(format!("{name}.step{step}.snapshot.csv"));
    match fs::write(&path, body) {
        Ok(()) => path.display().to_string(),
        Err(e) => format!("not written ({e})"),
    }
}

/// Runs a resolved scenario spec to completion.
///
/// `snapshot_dir`, when given, receives a nodal dump of the last good
/// state if the integration fails.
pub fn run_spec(
    spec: &RunSpec,
    ws: &mut Workspace,
    snapshot_dir: Option<&Path>,
) -> Result<ScenarioResult, CliError> {
    let tableau = resolve_tableau(&spec.tableau)?;
    let policy = ConservationPolicy::new(spec.conserve);
    let grid = SpectralGrid::new(spec.xmin, spec.xmax, spec.n)?;
    let start = Instant::now();

    let (rows, stats) = match spec.equation {
        Equation::Bbm => {
            let model = BbmModel::new(grid);
            let init = real_initial(spec.initial, spec.t0)?;
            let u0 = model.state_from_fn(ws, &*init)?;
            let mut snap = |ws: &mut Workspace, s: &BbmState, step: usize| {
                write_snapshot(snapshot_dir, &spec.name, step, ws, grid, &[("u", &s.u)])
            };
            match spec.reference {
                Reference::None => {
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, None, &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::ClosedForm => {
                    let form = real_closed_form(spec.initial, grid.length()).ok_or_else(|| {
                        CliError::InvalidConfig(format!(
                            "initial data {:?} has no closed-form solution",
                            spec.initial
                        ))
                    })?;
                    let mut rf = |ws: &mut Workspace, t: f64| -> Result<BbmState, CliError> {
                        Ok(model.state_from_fn(ws, |x| form(t, x))?)
                    };
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, Some(&mut rf), &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::FineReference => {
                    let fine_grid =
                        SpectralGrid::new(spec.xmin, spec.xmax, spec.n * REFERENCE_MODE_FACTOR)?;
                    let fine_model = BbmModel::new(fine_grid);
                    let mut fine_state = fine_model.state_from_fn(ws, &*init)?;
                    let mut fine_t = spec.t0;
                    let dt_ref = spec.dt / REFERENCE_DT_DIVISOR;
                    let mut rf = |ws: &mut Workspace, t: f64| -> Result<BbmState, CliError> {
                        if t > fine_t {
                            fine_state = fine_reference(
                                &fine_model,
                                ws,
                                fine_state.clone(),
                                fine_t,
                                t,
                                dt_ref,
                            )?;
                            fine_t = t;
                        }
                        Ok(BbmState {
                            u: truncate_field(&fine_state.u, grid),
                        })
                    };
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, Some(&mut rf), &mut snap,
                    )?;
                    (rows, stats)
                }
            }
        }
        Equation::Kdv => {
            let model = KdvModel::new(grid);
            let init = real_initial(spec.initial, spec.t0)?;
            let u0 = model.state_from_fn(ws, &*init)?;
            let mut snap = |ws: &mut Workspace, s: &KdvState, step: usize| {
                write_snapshot(snapshot_dir, &spec.name, step, ws, grid, &[("u", &s.u)])
            };
            match spec.reference {
                Reference::None => {
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, None, &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::ClosedForm => {
                    let form = real_closed_form(spec.initial, grid.length()).ok_or_else(|| {
                        CliError::InvalidConfig(format!(
                            "initial data {:?} has no closed-form solution",
                            spec.initial
                        ))
                    })?;
                    let mut rf = |ws: &mut Workspace, t: f64| -> Result<KdvState, CliError> {
                        Ok(model.state_from_fn(ws, |x| form(t, x))?)
                    };
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, Some(&mut rf), &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::FineReference => {
                    let fine_grid =
                        SpectralGrid::new(spec.xmin, spec.xmax, spec.n * REFERENCE_MODE_FACTOR)?;
                    let fine_model = KdvModel::new(fine_grid);
                    let mut fine_state = fine_model.state_from_fn(ws, &*init)?;
                    let mut fine_t = spec.t0;
                    let dt_ref = spec.dt / REFERENCE_DT_DIVISOR;
                    let mut rf = |ws: &mut Workspace, t: f64| -> Result<KdvState, CliError> {
                        if t > fine_t {
                            fine_state = fine_reference(
                                &fine_model,
                                ws,
                                fine_state.clone(),
                                fine_t,
                                t,
                                dt_ref,
                            )?;
                            fine_t = t;
                        }
                        Ok(KdvState {
                            u: truncate_field(&fine_state.u, grid),
                        })
                    };
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, Some(&mut rf), &mut snap,
                    )?;
                    (rows, stats)
                }
            }
        }
        Equation::Nls => {
            let model = NlsModel::new(grid, spec.beta);
            let init = complex_initial(spec.initial, spec.t0)?;
            let u0 = model.state_from_fn(ws, &*init)?;
            let mut snap = |ws: &mut Workspace, s: &NlsState, step: usize| {
                write_snapshot(
                    snapshot_dir,
                    &spec.name,
                    step,
                    ws,
                    grid,
                    &[("v", &s.v), ("w", &s.w)],
                )
            };
            match spec.reference {
                Reference::None => {
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, None, &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::ClosedForm => {
                    let form =
                        complex_closed_form(spec.initial, grid.length()).ok_or_else(|| {
                            CliError::InvalidConfig(format!(
                                "initial data {:?} has no closed-form solution",
                                spec.initial
                            ))
                        })?;
                    let mut rf = |ws: &mut Workspace, t: f64| -> Result<NlsState, CliError> {
                        Ok(model.state_from_fn(ws, |x| form(t, x))?)
                    };
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, Some(&mut rf), &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::FineReference => {
                    let fine_grid =
                        SpectralGrid::new(spec.xmin, spec.xmax, spec.n * REFERENCE_MODE_FACTOR)?;
                    let fine_model = NlsModel::new(fine_grid, spec.beta);
                    let mut fine_state = fine_model.state_from_fn(ws, &*init)?;
                    let mut fine_t = spec.t0;
                    let dt_ref = spec.dt / REFERENCE_DT_DIVISOR;
                    let mut rf = |ws: &mut Workspace, t: f64| -> Result<NlsState, CliError> {
                        if t > fine_t {
                            fine_state = fine_reference(
                                &fine_model,
                                ws,
                                fine_state.clone(),
                                fine_t,
                                t,
                                dt_ref,
                            )?;
                            fine_t = t;
                        }
                        Ok(NlsState {
                            v: truncate_field(&fine_state.v, grid),
                            w: truncate_field(&fine_state.w, grid),
                        })
                    };
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, Some(&mut rf), &mut snap,
                    )?;
                    (rows, stats)
                }
            }
        }
        Equation::HypNls => {
            let model = HypNlsModel::new(grid, spec.beta, spec.tau);
            let init = complex_initial(spec.initial, spec.t0)?;
            let u0 = model.state_from_fn(ws, &*init)?;
            let mut snap = |ws: &mut Workspace, s: &HypNlsState, step: usize| {
                write_snapshot(
                    snapshot_dir,
                    &spec.name,
                    step,
                    ws,
                    grid,
                    &[
                        ("v", &s.v),
                        ("w", &s.w),
                        ("nu", &s.nu),
                        ("omega", &s.omega),
                    ],
                )
            };
            match spec.reference {
                Reference::None => {
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, None, &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::ClosedForm => {
                    let form =
                        complex_closed_form(spec.initial, grid.length()).ok_or_else(|| {
                            CliError::InvalidConfig(format!(
                                "initial data {:?} has no closed-form solution",
                                spec.initial
                            ))
                        })?;
                    let mut rf = |ws: &mut Workspace, t: f64| -> Result<HypNlsState, CliError> {
                        Ok(model.state_from_fn(ws, |x| form(t, x))?)
                    };
                    let (rows, stats, _) = march(
                        &model, ws, &tableau, &policy, u0, spec.t0, spec.steps, spec.dt,
                        spec.cadence, Some(&mut rf), &mut snap,
                    )?;
                    (rows, stats)
                }
                Reference::FineReference => {
                    return Err(CliError::InvalidConfig(
                        "fine-reference tracking is not wired up for the hyperbolized model"
                            .to_string(),
                    ));
                }
            }
        }
    };

    let wall_seconds = start.elapsed().as_secs_f64();
    let span = spec.t1 - spec.t0;
    let last = rows.last().expect("at least the initial row");
    let summary = RunSummary {
        steps: spec.steps,
        wall_seconds,
        final_time: last.t,
        final_error: last.l2_error,
        max_mass_drift: rows.iter().fold(0.0, |a, r| a.max(r.mass_rel_drift.abs())),
        max_momentum_drift: rows
            .iter()
            .fold(0.0, |a, r| a.max(r.momentum_rel_drift.abs())),
        max_energy_drift: rows
            .iter()
            .fold(0.0, |a, r| a.max(r.energy_rel_drift.abs())),
        error_growth_slope: error_growth_slope(&rows, spec.t0, (span / 8.0, span)),
        gamma_min: stats.gamma_min,
        gamma_max: stats.gamma_max,
        mean_abs_gamma_dev: stats.abs_gamma_dev_sum / spec.steps as f64,
        total_root_evaluations: stats.total_root_evaluations,
        max_root_evaluations: stats.max_root_evaluations,
        degenerate_relaxations: stats.degenerate_relaxations,
    };
    Ok(ScenarioResult { rows, summary })
}
