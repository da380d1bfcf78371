use crate::conservation::{ConserveMode, ConservationPolicy, RelaxError};
use crate::models::{
    BbmModel, BbmState, Conserved, HypNlsModel, InvariantTriple, KdvModel, KdvState,
    ModelError, NlsModel, NlsState,
};
use crate::spectral::{ModalField, Workspace};

/// Models that can project a state onto the manifold where the selected
/// invariants take prescribed values.
///
/// The projection handles mass (and momentum in the full mode); energy is
/// restored separately by the relaxation parameter, which re-applies the
/// projection at every candidate point.
pub trait Projectable: Conserved {
    fn project(
        &self,
        ws: &mut Workspace,
        state: &Self::State,
        targets: &InvariantTriple,
        policy: &ConservationPolicy,
    ) -> Result<Self::State, RelaxError>;
}

/// Mean shift plus scaling of the zero-mean part: restores the linear
/// mass exactly and then the quadratic momentum form by radial scaling.
/// `momentum_form` evaluates the form on the zero-mean deviation.
fn shift_and_scale(
    u: &ModalField,
    mass_target: f64,
    momentum_target: f64,
    momentum_form: impl Fn(&ModalField) -> Result<f64, ModelError>,
) -> Result<ModalField, RelaxError> {
    let length = u.grid().length();
    let mean_target = mass_target / length;
    let mut dev = u.clone();
    dev.shift_mean(-u.mean());
    let dev_form = momentum_form(&dev)?;
    if !dev_form.is_finite() || dev_form <= 1e-300 {
        return Err(RelaxError::DegenerateProjection(
            "state has no zero-mean part to scale".into(),
        ));
    }
    // the momentum of the constant part; both forms reduce to u^2/2 there
    let const_part = 0.5 * mean_target * mean_target * length;
    let ratio = (momentum_target - const_part) / dev_form;
    if ratio <= 0.0 {
        return Err(RelaxError::DegenerateProjection(format!(
            "momentum target {momentum_target} is below the constant-state floor {const_part}"
        )));
    }
    dev.scale(ratio.sqrt());
    dev.shift_mean(mean_target);
    Ok(dev)
}

impl Projectable for BbmModel {
    fn project(
        &self,
        _ws: &mut Workspace,
        state: &Self::State,
        targets: &InvariantTriple,
        policy: &ConservationPolicy,
    ) -> Result<Self::State, RelaxError> {
        match policy.mode {
            // mass is linear and carried exactly by the stepper already
            ConserveMode::None | ConserveMode::MassEnergy => Ok(state.clone()),
            ConserveMode::MassMomentumEnergy => {
                let u = shift_and_scale(&state.u, targets.mass, targets.momentum, |dev| {
                    let dx = dev.derivative(1);
                    Ok(0.5 * (dev.inner_product(dev)? + dx.inner_product(&dx)?))
                })?;
                Ok(BbmState { u })
            }
        }
    }
}

impl Projectable for KdvModel {
    fn project(
        &self,
        _ws: &mut Workspace,
        state: &Self::State,
        targets: &InvariantTriple,
        policy: &ConservationPolicy,
    ) -> Result<Self::State, RelaxError> {
        match policy.mode {
            ConserveMode::None | ConserveMode::MassEnergy => Ok(state.clone()),
            ConserveMode::MassMomentumEnergy => {
                let u = shift_and_scale(&state.u, targets.mass, targets.momentum, |dev| {
                    Ok(0.5 * dev.inner_product(dev)?)
                })?;
                Ok(KdvState { u })
            }
        }
    }
}

impl Projectable for NlsModel {
    fn project(
        &self,
        _ws: &mut Workspace,
        state: &Self::State,
        targets: &InvariantTriple,
        policy: &ConservationPolicy,
    ) -> Result<Self::State, RelaxError> {
        match policy.mode {
            ConserveMode::None => Ok(state.clone()),
            ConserveMode::MassEnergy => {
                let mass = state.v.inner_product(&state.v).map_err(ModelError::from)?
                    + state.w.inner_product(&state.w).map_err(ModelError::from)?;
                if mass <= 1e-300 {
                    return Err(RelaxError::DegenerateProjection("zero-mass state".into()));
                }
                let ratio = targets.mass / mass;
                if ratio <= 0.0 {
                    return Err(RelaxError::DegenerateProjection(
                        "mass target has the wrong sign".into(),
                    ));
                }
                let mut out = state.clone();
                let r = ratio.sqrt();
                out.v.scale(r);
                out.w.scale(r);
                Ok(out)
            }
            ConserveMode::MassMomentumEnergy => project_nls_full(state, targets, policy),
        }
    }
}

/// Two-parameter projection `(v, w) -> (l v + m w_x, l w - m v_x)`
/// hitting prescribed mass and momentum.
///
/// Both functionals are quadratic in `(l, m)` with coefficients built
/// from four inner products of the unprojected state, so the Newton
/// iteration is pure scalar arithmetic and the fields are assembled once
/// at the end.
fn project_nls_full(
    state: &NlsState,
    targets: &InvariantTriple,
    policy: &ConservationPolicy,
) -> Result<NlsState, RelaxError> {
    let vx = state.v.derivative(1);
    let wx = state.w.derivative(1);
    let wxx = wx.derivative(1);
    let err = ModelError::from;
    // mass(l, m)     = l^2 m0 + 2 l m p0 + m^2 g0
    // momentum(l, m) = l^2 p0 + 2 l m g0 + m^2 d0
    let m0 = state.v.inner_product(&state.v).map_err(err)?
        + state.w.inner_product(&state.w).map_err(err)?;
    let p0 = 2.0 * state.v.inner_product(&wx).map_err(err)?;
    let g0 = vx.inner_product(&vx).map_err(err)? + wx.inner_product(&wx).map_err(err)?;
    let d0 = 2.0 * vx.inner_product(&wxx).map_err(err)?;

    let scale = 1.0 + targets.mass.abs() + targets.momentum.abs();
    let (mut l, mut m) = (1.0f64, 0.0f64);
    let mut residual = f64::INFINITY;
    for _ in 0..policy.max_newton_iterations {
        let f1 = l * l * m0 + 2.0 * l * m * p0 + m * m * g0 - targets.mass;
        let f2 = l * l * p0 + 2.0 * l * m * g0 + m * m * d0 - targets.momentum;
        residual = f1.abs().max(f2.abs());
        if residual <= policy.newton_tol * scale {
            let mut v = state.v.clone();
            v.scale(l);
            v.axpy(m, &wx);
            let mut w = state.w.clone();
            w.scale(l);
            w.axpy(-m, &vx);
            return Ok(NlsState { v, w });
        }
        let j11 = 2.0 * (l * m0 + m * p0);
        let j12 = 2.0 * (l * p0 + m * g0);
        let j21 = j12;
        let j22 = 2.0 * (l * g0 + m * d0);
        let det = j11 * j22 - j12 * j21;
        if det.abs() <= 1e-300 {
            return Err(RelaxError::DegenerateProjection(
                "singular Jacobian in the two-parameter projection".into(),
            ));
        }
        let dl = (f1 * j22 - f2 * j12) / det;
        let dm = (f2 * j11 - f1 * j21) / det;
        // plain Newton overshoots on strongly curved level sets; halve
        // the step when the full update would grow the residual
        let mut step = 1.0;
        loop {
            let lt = l - step * dl;
            let mt = m - step * dm;
            let g1 = lt * lt * m0 + 2.0 * lt * mt * p0 + mt * mt * g0 - targets.mass;
            let g2 = lt * lt * p0 + 2.0 * lt * mt * g0 + mt * mt * d0 - targets.momentum;
            if g1.abs().max(g2.abs()) < residual || step < 1.0 / 16.0 {
                l = lt;
                m = mt;
                break;
            }
            step *= 0.5;
        }
    }
    Err(RelaxError::NewtonStalled {
        iterations: policy.max_newton_iterations,
        residual,
    })
}

impl Projectable for HypNlsModel {
    fn project(
        &self,
        _ws: &mut Workspace,
        state: &Self::State,
        targets: &InvariantTriple,
        policy: &ConservationPolicy,
    ) -> Result<Self::State, RelaxError> {
        match policy.mode {
            ConserveMode::None => Ok(state.clone()),
            ConserveMode::MassEnergy => {
                let tau = self.tau();
                let err = ModelError::from;
                let q2 = state.v.inner_product(&state.v).map_err(err)?
                    + state.w.inner_product(&state.w).map_err(err)?;
                let p2 = state.nu.inner_product(&state.nu).map_err(err)?
                    + state.omega.inner_product(&state.omega).map_err(err)?;
                let c = targets.mass;
                let denom = q2 + p2 * tau.powi(3);
                let radicand = -p2 * q2 * (tau - 1.0).powi(2) * tau + c * denom;
                if denom <= 1e-300 || radicand < 0.0 {
                    return Err(RelaxError::DegenerateProjection(format!(
                        "mass scaling has no real solution (radicand {radicand:.3e})"
                    )));
                }
                let root = radicand.sqrt();
                let a1 = (p2 * (tau - 1.0) * tau * tau + root) / denom;
                let a2 = (q2 * (1.0 - tau) + tau * root) / denom;
                let mut out = state.clone();
                out.v.scale(a1);
                out.w.scale(a1);
                out.nu.scale(a2);
                out.omega.scale(a2);
                Ok(out)
            }
            ConserveMode::MassMomentumEnergy => Err(RelaxError::UnsupportedPolicy {
                model: "hyperbolized NLS",
                mode: policy.mode,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::StateOps;
    use crate::spectral::SpectralGrid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(-1.0, 2.0 * PI - 1.0, 32).unwrap()
    }

    fn policy(mode: ConserveMode) -> ConservationPolicy {
        ConservationPolicy::new(mode)
    }

    fn wave(x: f64) -> f64 {
        0.3 + (x + 0.2).cos() + 0.4 * (2.0 * x).sin() + 0.1 * (3.0 * x - 1.0).cos()
    }

    #[test]
    fn bbm_full_projection_hits_targets_and_is_idempotent() {
        let model = BbmModel::new(grid());
        let mut ws = Workspace::new();
        let u = model.state_from_fn(&mut ws, wave).unwrap();
        let start = model.invariants(&mut ws, &u).unwrap();
        let targets = InvariantTriple {
            mass: start.mass + 0.01,
            momentum: start.momentum * 1.02,
            energy: start.energy,
        };
        let pol = policy(ConserveMode::MassMomentumEnergy);
        let proj = model.project(&mut ws, &u, &targets, &pol).unwrap();
        let got = model.invariants(&mut ws, &proj).unwrap();
        assert!((got.mass - targets.mass).abs() < 1e-12);
        assert!((got.momentum - targets.momentum).abs() < 1e-12);
        let again = model.project(&mut ws, &proj, &targets, &pol).unwrap();
        assert!(again.l2_distance(&proj) < 1e-13);
    }

    #[test]
    fn kdv_full_projection_hits_targets() {
        let model = KdvModel::new(grid());
        let mut ws = Workspace::new();
        let u = model.state_from_fn(&mut ws, wave).unwrap();
        let start = model.invariants(&mut ws, &u).unwrap();
        let targets = InvariantTriple {
            mass: start.mass * 0.98 - 0.02,
            momentum: start.momentum * 1.05,
            energy: start.energy,
        };
        let proj = model
            .project(
                &mut ws,
                &u,
                &targets,
                &policy(ConserveMode::MassMomentumEnergy),
            )
            .unwrap();
        let got = model.invariants(&mut ws, &proj).unwrap();
        assert!((got.mass - targets.mass).abs() < 1e-12);
        assert!((got.momentum - targets.momentum).abs() < 1e-12);
    }

    #[test]
    fn nls_reduced_projection_scales_mass() {
        let model = NlsModel::new(grid(), 2.0);
        let mut ws = Workspace::new();
        let u = model
            .state_from_fn(&mut ws, |x| Complex64::new(wave(x), wave(-x) - 0.2))
            .unwrap();
        let start = model.invariants(&mut ws, &u).unwrap();
        let targets = InvariantTriple {
            mass: start.mass * 1.03,
            momentum: start.momentum,
            energy: start.energy,
        };
        let proj = model
            .project(&mut ws, &u, &targets, &policy(ConserveMode::MassEnergy))
            .unwrap();
        let got = model.invariants(&mut ws, &proj).unwrap();
        assert!((got.mass - targets.mass).abs() < 1e-12 * targets.mass.abs());
    }

    #[test]
    fn nls_full_projection_hits_both_quadratic_invariants() {
        let model = NlsModel::new(grid(), 2.0);
        let mut ws = Workspace::new();
        let u = model
            .state_from_fn(&mut ws, |x| {
                Complex64::new(wave(x), 0.7 * (1.3 * wave(-x)).sin())
            })
            .unwrap();
        let start = model.invariants(&mut ws, &u).unwrap();
        let targets = InvariantTriple {
            mass: start.mass * 1.01,
            momentum: start.momentum * 0.97 + 0.005,
            energy: start.energy,
        };
        let pol = policy(ConserveMode::MassMomentumEnergy);
        let proj = model.project(&mut ws, &u, &targets, &pol).unwrap();
        let got = model.invariants(&mut ws, &proj).unwrap();
        let scale = 1.0 + targets.mass.abs() + targets.momentum.abs();
        assert!((got.mass - targets.mass).abs() < 1e-12 * scale);
        assert!((got.momentum - targets.momentum).abs() < 1e-12 * scale);
        // projection of an on-target state stays put
        let fixed = model.project(&mut ws, &proj, &targets, &pol).unwrap();
        assert!(fixed.l2_distance(&proj) < 1e-10);
    }

    #[test]
    fn hyperbolized_reduced_projection_restores_mass() {
        let tau = 0.2;
        let model = HypNlsModel::new(grid(), 1.0, tau);
        let mut ws = Workspace::new();
        let mut u = model
            .state_from_fn(&mut ws, |x| Complex64::new(wave(x), wave(1.5 * x)))
            .unwrap();
        u.nu.axpy(0.2, &u.w);
        let start = model.invariants(&mut ws, &u).unwrap();
        let targets = InvariantTriple {
            mass: start.mass * 1.04,
            momentum: start.momentum,
            energy: start.energy,
        };
        let pol = policy(ConserveMode::MassEnergy);
        let proj = model.project(&mut ws, &u, &targets, &pol).unwrap();
        let got = model.invariants(&mut ws, &proj).unwrap();
        assert!((got.mass - targets.mass).abs() < 1e-12 * targets.mass.abs());
        // on-target state is a fixed point
        let fixed = model.project(&mut ws, &proj, &targets, &pol).unwrap();
        assert!(fixed.l2_distance(&proj) < 1e-12);
    }

    #[test]
    fn hyperbolized_full_projection_is_rejected() {
        let model = HypNlsModel::new(grid(), 1.0, 0.1);
        let mut ws = Workspace::new();
        let u = model
            .state_from_fn(&mut ws, |x| Complex64::new(x.cos(), x.sin()))
            .unwrap();
        let targets = model.invariants(&mut ws, &u).unwrap();
        let err = model
            .project(
                &mut ws,
                &u,
                &targets,
                &policy(ConserveMode::MassMomentumEnergy),
            )
            .unwrap_err();
        assert!(matches!(err, RelaxError::UnsupportedPolicy { .. }));
    }

    #[test]
    fn impossible_momentum_target_is_degenerate() {
        let model = KdvModel::new(grid());
        let mut ws = Workspace::new();
        let u = model.state_from_fn(&mut ws, wave).unwrap();
        let start = model.invariants(&mut ws, &u).unwrap();
        let targets = InvariantTriple {
            mass: start.mass,
            // below the constant-state floor: unreachable by scaling
            momentum: 0.5 * start.mass * start.mass / grid().length() - 1.0,
            energy: start.energy,
        };
        let err = model
            .project(
                &mut ws,
                &u,
                &targets,
                &policy(ConserveMode::MassMomentumEnergy),
            )
            .unwrap_err();
        assert!(matches!(err, RelaxError::DegenerateProjection(_)));
    }
}
