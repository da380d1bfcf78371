use num_complex::Complex64;

use crate::models::{
    impl_state_ops, total_integral, Conserved, InvariantTriple, ModelError, StateOps, System,
};
use crate::spectral::{ModalField, SpectralGrid, Workspace};

/// Benjamin-Bona-Mahony equation `u_t + u u_x - u_txx = 0`.
///
/// Inverting `I - d_xx` puts the evolution in the form
/// `u_t = -(I - d_xx)^{-1} d_x P(u^2 / 2)`, which is bounded uniformly in
/// the wavenumber: the whole right-hand side is non-stiff and the equation
/// integrates well with the explicit half of an additive Runge-Kutta pair.
///
/// Conserved functionals: mass `int u`, the `H^1` momentum
/// `int (u^2 + u_x^2) / 2`, and energy `int u^3 / 6`.
pub struct BbmModel {
    grid: SpectralGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbmState {
    pub u: ModalField,
}

impl_state_ops!(BbmState, u);

impl BbmModel {
    pub fn new(grid: SpectralGrid) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    /// Samples `f` on the grid nodes into a state.
    pub fn state_from_fn(
        &self,
        ws: &mut Workspace,
        f: impl Fn(f64) -> f64,
    ) -> Result<BbmState, ModelError> {
        let values: Vec<f64> = self.grid.nodes().iter().map(|&x| f(x)).collect();
        Ok(BbmState {
            u: ws.forward(self.grid, &values)?,
        })
    }
}

impl System for BbmModel {
    type State = BbmState;

    fn split_tangents(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<(Self::State, Self::State), ModelError> {
        let q = ws.project_nonlinearity(&[&s.u], 2, |v| 0.5 * v[0] * v[0])?;
        // -(I - d_xx)^{-1} d_x maps mode k to -ik / (1 + k^2)
        let du = q.apply_symbol(|k| Complex64::new(0.0, -k / (1.0 + k * k)))?;
        Ok((BbmState { u: du }, s.zeros_like()))
    }

    fn implicit_stage_solve(
        &self,
        _z: Complex64,
        rhs: &Self::State,
    ) -> Result<Self::State, ModelError> {
        // the stiff part is identically zero, so (I - z L) is the identity
        Ok(rhs.clone())
    }

    fn has_stiff_part(&self) -> bool {
        false
    }
}

impl Conserved for BbmModel {
    fn invariants(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<InvariantTriple, ModelError> {
        let ux = s.u.derivative(1);
        let momentum = 0.5 * (s.u.inner_product(&s.u)? + ux.inner_product(&ux)?);
        Ok(InvariantTriple {
            mass: total_integral(&s.u),
            momentum,
            energy: self.energy(ws, s)?,
        })
    }

    fn energy(&self, ws: &mut Workspace, s: &Self::State) -> Result<f64, ModelError> {
        Ok(ws.integral_of_nonlinearity(&[&s.u], 3, |v| v[0] * v[0] * v[0] / 6.0)?)
    }
}
