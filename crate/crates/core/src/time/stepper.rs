use num_complex::Complex64;

use crate::models::{ModelError, StateOps, System};
use crate::spectral::Workspace;
use crate::time::ArkTableau;

/// One additive Runge-Kutta step of size `dt` from `u`.
///
/// With an implicit-explicit tableau the non-stiff tangent is integrated
/// by the explicit part and the stiff tangent by the ESDIRK part, each
/// diagonal stage costing one mode-diagonal solve. With an explicit-only
/// tableau the whole tangent is treated explicitly.
pub fn ark_step<M: System>(
    model: &M,
    ws: &mut Workspace,
    tableau: &ArkTableau,
    dt: f64,
    u: &M::State,
) -> Result<M::State, ModelError> {
    let s = tableau.stages();
    if tableau.is_implicit() {
        let mut fe: Vec<M::State> = Vec::with_capacity(s);
        let mut fi: Vec<M::State> = Vec::with_capacity(s);
        let (e0, i0) = model.split_tangents(ws, u)?;
        fe.push(e0);
        fi.push(i0);
        for i in 1..s {
            let mut rhs = u.clone();
            for j in 0..i {
                let ae = tableau.a_explicit[i][j];
                if ae != 0.0 {
                    rhs.axpy(dt * ae, &fe[j]);
                }
                let ai = tableau.a_implicit[i][j];
                if ai != 0.0 {
                    rhs.axpy(dt * ai, &fi[j]);
                }
            }
            let aii = tableau.a_implicit[i][i];
            let stage = if aii != 0.0 {
                model.implicit_stage_solve(Complex64::new(dt * aii, 0.0), &rhs)?
            } else {
                rhs
            };
            let (ei, ii) = model.split_tangents(ws, &stage)?;
            fe.push(ei);
            fi.push(ii);
        }
        let mut out = u.clone();
        for j in 0..s {
            let bj = tableau.b[j];
            if bj != 0.0 {
                out.axpy(dt * bj, &fe[j]);
                out.axpy(dt * bj, &fi[j]);
            }
        }
        Ok(out)
    } else {
        let mut f: Vec<M::State> = Vec::with_capacity(s);
        f.push(model.tangent(ws, u)?);
        for i in 1..s {
            let mut stage = u.clone();
            for (fj, &ae) in f.iter().zip(&tableau.a_explicit[i]) {
                if ae != 0.0 {
                    stage.axpy(dt * ae, fj);
                }
            }
            f.push(model.tangent(ws, &stage)?);
        }
        let mut out = u.clone();
        for (fj, &bj) in f.iter().zip(&tableau.b) {
            if bj != 0.0 {
                out.axpy(dt * bj, fj);
            }
        }
        Ok(out)
    }
}

/// Integrates from `t0` to `t1` with uniform steps of nominal size `dt`,
/// shrinking the final step to land exactly on `t1`. No conservation
/// correction is applied.
pub fn integrate<M: System>(
    model: &M,
    ws: &mut Workspace,
    tableau: &ArkTableau,
    mut u: M::State,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<M::State, ModelError> {
    assert!(dt > 0.0 && t1 >= t0, "integration interval must be forward");
    let span = t1 - t0;
    let whole = (span / dt + 1e-9).floor();
    let n = whole as usize;
    for _ in 0..n {
        u = ark_step(model, ws, tableau, dt, &u)?;
    }
    let remainder = span - whole * dt;
    if remainder > 1e-12 * dt.max(1.0) {
        u = ark_step(model, ws, tableau, remainder, &u)?;
    }
    Ok(u)
}
