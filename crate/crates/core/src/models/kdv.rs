use num_complex::Complex64;

use crate::models::{
    impl_state_ops, total_integral, Conserved, InvariantTriple, ModelError, System,
};
use crate::spectral::{ModalField, SpectralGrid, Workspace};

/// Korteweg-de Vries equation `u_t + u u_x + u_xxx = 0`.
///
/// Split for additive integration: the projected advection
/// `-d_x P(u^2 / 2)` is non-stiff, the third derivative `-d_xxx u` is
/// stiff and diagonal in Fourier space, so each implicit stage costs one
/// scalar division per mode.
///
/// Conserved functionals: mass `int u`, momentum `int u^2 / 2`, and
/// energy `int (u_x^2 / 2 - u^3 / 6)`.
pub struct KdvModel {
    grid: SpectralGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KdvState {
    pub u: ModalField,
}

impl_state_ops!(KdvState, u);

impl KdvModel {
    pub fn new(grid: SpectralGrid) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn state_from_fn(
        &self,
        ws: &mut Workspace,
        f: impl Fn(f64) -> f64,
    ) -> Result<KdvState, ModelError> {
        let values: Vec<f64> = self.grid.nodes().iter().map(|&x| f(x)).collect();
        Ok(KdvState {
            u: ws.forward(self.grid, &values)?,
        })
    }
}

impl System for KdvModel {
    type State = KdvState;

    fn split_tangents(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<(Self::State, Self::State), ModelError> {
        let q = ws.project_nonlinearity(&[&s.u], 2, |v| 0.5 * v[0] * v[0])?;
        let nonstiff = q.apply_symbol(|k| Complex64::new(0.0, -k))?;
        // -(ik)^3 = i k^3
        let stiff = s.u.apply_symbol(|k| Complex64::new(0.0, k * k * k))?;
        Ok((KdvState { u: nonstiff }, KdvState { u: stiff }))
    }

    fn implicit_stage_solve(
        &self,
        z: Complex64,
        rhs: &Self::State,
    ) -> Result<Self::State, ModelError> {
        let grid = rhs.u.grid();
        let mut coeffs = Vec::with_capacity(grid.half_len());
        for (j, &c) in rhs.u.coeffs().iter().enumerate() {
            let k = grid.wavenumber(j);
            let denom = Complex64::new(1.0, 0.0) - z * Complex64::new(0.0, k * k * k);
            if denom.norm() <= 1e-14 * (1.0 + (z.norm() * k * k * k).abs()) {
                return Err(ModelError::SingularStage { k, z });
            }
            coeffs.push(c / denom);
        }
        Ok(KdvState {
            u: ModalField::from_coeffs_unchecked(grid, coeffs),
        })
    }
}

impl Conserved for KdvModel {
    fn invariants(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<InvariantTriple, ModelError> {
        Ok(InvariantTriple {
            mass: total_integral(&s.u),
            momentum: 0.5 * s.u.inner_product(&s.u)?,
            energy: self.energy(ws, s)?,
        })
    }

    fn energy(&self, ws: &mut Workspace, s: &Self::State) -> Result<f64, ModelError> {
        let ux = s.u.derivative(1);
        let gradient = 0.5 * ux.inner_product(&ux)?;
        let cubic = ws.integral_of_nonlinearity(&[&s.u], 3, |v| v[0] * v[0] * v[0] / 6.0)?;
        Ok(gradient - cubic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::StateOps;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn setup(n: usize) -> (KdvModel, Workspace) {
        let grid = SpectralGrid::new(0.0, 2.0 * PI, n).unwrap();
        (KdvModel::new(grid), Workspace::new())
    }

    #[test]
    fn stiff_tangent_of_sin_is_cos() {
        let (model, mut ws) = setup(16);
        let s = model.state_from_fn(&mut ws, f64::sin).unwrap();
        let (_, stiff) = model.split_tangents(&mut ws, &s).unwrap();
        let expect = model.state_from_fn(&mut ws, f64::cos).unwrap();
        // rounding in the sampled sine is amplified by k^3 at high modes
        assert!(stiff.l2_distance(&expect) < 1e-12);
    }

    #[test]
    fn nonstiff_tangent_of_sin() {
        // -d_x P(sin^2 x / 2) = -d_x [(1 - cos 2x)/4] = -sin(2x)/2
        let (model, mut ws) = setup(16);
        let s = model.state_from_fn(&mut ws, f64::sin).unwrap();
        let (nonstiff, _) = model.split_tangents(&mut ws, &s).unwrap();
        let expect = model
            .state_from_fn(&mut ws, |x| -(2.0 * x).sin() / 2.0)
            .unwrap();
        assert!(nonstiff.l2_distance(&expect) < 1e-14);
    }

    #[test]
    fn invariants_of_sin() {
        let (model, mut ws) = setup(16);
        let s = model.state_from_fn(&mut ws, f64::sin).unwrap();
        let inv = model.invariants(&mut ws, &s).unwrap();
        assert_relative_eq!(inv.mass, 0.0, epsilon = 1e-14);
        assert_relative_eq!(inv.momentum, PI / 2.0, max_relative = 1e-14);
        // int (cos^2/2 - sin^3/6) = pi/2
        assert_relative_eq!(inv.energy, PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn implicit_solve_residual_vanishes() {
        let (model, mut ws) = setup(16);
        let rhs = model
            .state_from_fn(&mut ws, |x| x.sin() + 0.3 * (3.0 * x).cos())
            .unwrap();
        let z = Complex64::new(0.37, -2.1);
        let x = model.implicit_stage_solve(z, &rhs).unwrap();
        // residual (I - z L) x - rhs, with L applied mode by mode
        let grid = x.u.grid();
        for (j, (&xc, &rc)) in x.u.coeffs().iter().zip(rhs.u.coeffs()).enumerate() {
            let k = grid.wavenumber(j);
            let l = Complex64::new(0.0, k * k * k);
            let res = xc - z * l * xc - rc;
            assert!(res.norm() <= 1e-12 * (1.0 + rc.norm()), "mode {j}");
        }
    }
}
