use num_complex::Complex64;

use crate::models::linsolve::solve_dense;
use crate::models::{impl_state_ops, Conserved, InvariantTriple, ModelError, System};
use crate::spectral::{dealias_grid_size, ModalField, SpectralGrid, Workspace};

/// First-order hyperbolic relaxation of the cubic Schroedinger equation.
///
/// The second derivatives are offloaded onto auxiliary fields `nu ~ v_x`
/// and `omega ~ w_x` driven on a fast time scale `tau`:
///
/// ```text
/// v_t  = -omega_x - beta P((v^2 + w^2) w)
/// w_t  =  nu_x    + beta P((v^2 + w^2) v)
/// nu_t    = (w_x - omega) / tau
/// omega_t = (-v_x + nu)   / tau
/// ```
///
/// As `tau -> 0` the last two equations pin `nu = v_x`, `omega = w_x` and
/// the first two collapse to the cubic Schroedinger equation. The whole
/// linear part is treated implicitly; only the cubic terms are explicit,
/// so the stage solves stay 4 x 4 per mode.
///
/// Conserved functionals: mass `int (v^2 + w^2 + tau nu^2 + tau omega^2)`,
/// momentum `2 int (v w_x + tau nu omega_x)`, and energy
/// `int (2 nu v_x - nu^2 + 2 omega w_x - omega^2 - (beta/2)(v^2 + w^2)^2)`.
pub struct HypNlsModel {
    grid: SpectralGrid,
    beta: f64,
    tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypNlsState {
    pub v: ModalField,
    pub w: ModalField,
    pub nu: ModalField,
    pub omega: ModalField,
}

impl_state_ops!(HypNlsState, v, w, nu, omega);

impl HypNlsModel {
    pub fn new(grid: SpectralGrid, beta: f64, tau: f64) -> Self {
        assert!(tau > 0.0, "relaxation time must be positive");
        Self { grid, beta, tau }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Samples a complex-valued profile and initializes the auxiliary
    /// fields on their slow manifold, `nu = v_x` and `omega = w_x`.
    pub fn state_from_fn(
        &self,
        ws: &mut Workspace,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<HypNlsState, ModelError> {
        let nodes = self.grid.nodes();
        let vv: Vec<f64> = nodes.iter().map(|&x| f(x).re).collect();
        let wv: Vec<f64> = nodes.iter().map(|&x| f(x).im).collect();
        let v = ws.forward(self.grid, &vv)?;
        let w = ws.forward(self.grid, &wv)?;
        let nu = v.derivative(1);
        let omega = w.derivative(1);
        Ok(HypNlsState { v, w, nu, omega })
    }
}

impl System for HypNlsModel {
    type State = HypNlsState;

    fn split_tangents(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<(Self::State, Self::State), ModelError> {
        let m = dealias_grid_size(self.grid.n(), 3);
        let vv = ws.evaluate(&s.v, m)?;
        let wv = ws.evaluate(&s.w, m)?;
        let mut cube_w = vec![0.0; m];
        let mut cube_v = vec![0.0; m];
        for i in 0..m {
            let sq = vv[i] * vv[i] + wv[i] * wv[i];
            cube_w[i] = sq * wv[i];
            cube_v[i] = sq * vv[i];
        }
        let mut pv = ws.project_samples(self.grid, &cube_w)?;
        let mut pw = ws.project_samples(self.grid, &cube_v)?;
        pv.scale(-self.beta);
        pw.scale(self.beta);
        let nonstiff = HypNlsState {
            v: pv,
            w: pw,
            nu: ModalField::zeros(self.grid),
            omega: ModalField::zeros(self.grid),
        };

        let inv_tau = 1.0 / self.tau;
        let mut nu_dot = s.w.derivative(1);
        nu_dot.axpy(-1.0, &s.omega);
        nu_dot.scale(inv_tau);
        let mut omega_dot = s.v.derivative(1);
        omega_dot.scale(-1.0);
        omega_dot.axpy(1.0, &s.nu);
        omega_dot.scale(inv_tau);
        let mut stiff_v = s.omega.derivative(1);
        stiff_v.scale(-1.0);
        let stiff = HypNlsState {
            v: stiff_v,
            w: s.nu.derivative(1),
            nu: nu_dot,
            omega: omega_dot,
        };
        Ok((nonstiff, stiff))
    }

    fn implicit_stage_solve(
        &self,
        z: Complex64,
        rhs: &Self::State,
    ) -> Result<Self::State, ModelError> {
        let grid = rhs.v.grid();
        let half = grid.half_len();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let inv_tau = 1.0 / self.tau;
        let mut v = Vec::with_capacity(half);
        let mut w = Vec::with_capacity(half);
        let mut nu = Vec::with_capacity(half);
        let mut omega = Vec::with_capacity(half);
        for j in 0..half {
            let k = grid.wavenumber(j);
            let zik = z * Complex64::new(0.0, k);
            // (I - z L)(v, w, nu, omega) = rhs
            let a = [
                [one, zero, zero, zik],
                [zero, one, -zik, zero],
                [zero, -zik * inv_tau, one, z * inv_tau],
                [zik * inv_tau, zero, -z * inv_tau, one],
            ];
            let b = [
                rhs.v.coeff(j),
                rhs.w.coeff(j),
                rhs.nu.coeff(j),
                rhs.omega.coeff(j),
            ];
            let x = solve_dense(a, b).ok_or(ModelError::SingularStage { k, z })?;
            v.push(x[0]);
            w.push(x[1]);
            nu.push(x[2]);
            omega.push(x[3]);
        }
        Ok(HypNlsState {
            v: ModalField::from_coeffs_unchecked(grid, v),
            w: ModalField::from_coeffs_unchecked(grid, w),
            nu: ModalField::from_coeffs_unchecked(grid, nu),
            omega: ModalField::from_coeffs_unchecked(grid, omega),
        })
    }
}

impl Conserved for HypNlsModel {
    fn invariants(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<InvariantTriple, ModelError> {
        let mass = s.v.inner_product(&s.v)?
            + s.w.inner_product(&s.w)?
            + self.tau * (s.nu.inner_product(&s.nu)? + s.omega.inner_product(&s.omega)?);
        let momentum = 2.0
            * (s.v.inner_product(&s.w.derivative(1))?
                + self.tau * s.nu.inner_product(&s.omega.derivative(1))?);
        Ok(InvariantTriple {
            mass,
            momentum,
            energy: self.energy(ws, s)?,
        })
    }

    fn energy(&self, ws: &mut Workspace, s: &Self::State) -> Result<f64, ModelError> {
        let quadratic = 2.0 * s.nu.inner_product(&s.v.derivative(1))?
            - s.nu.inner_product(&s.nu)?
            + 2.0 * s.omega.inner_product(&s.w.derivative(1))?
            - s.omega.inner_product(&s.omega)?;
        let quartic = ws.integral_of_nonlinearity(&[&s.v, &s.w], 4, |a| {
            let sq = a[0] * a[0] + a[1] * a[1];
            sq * sq
        })?;
        Ok(quadratic - 0.5 * self.beta * quartic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::StateOps;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn setup(beta: f64, tau: f64) -> (HypNlsModel, Workspace) {
        let grid = SpectralGrid::new(0.0, 2.0 * PI, 16).unwrap();
        (HypNlsModel::new(grid, beta, tau), Workspace::new())
    }

    /// On the slow manifold the auxiliary equations are quiescent and the
    /// plane wave has the same cancellation as in the second-order form.
    #[test]
    fn plane_wave_tangents_cancel_on_manifold() {
        let (model, mut ws) = setup(1.0, 1e-3);
        let s = model
            .state_from_fn(&mut ws, |x| Complex64::new(x.cos(), x.sin()))
            .unwrap();
        let (nonstiff, stiff) = model.split_tangents(&mut ws, &s).unwrap();
        assert!(stiff.nu.norm_l2() < 1e-10, "nu driven off manifold");
        assert!(stiff.omega.norm_l2() < 1e-10, "omega driven off manifold");
        let mut total = nonstiff;
        total.axpy(1.0, &stiff);
        assert!(total.l2_distance(&s.zeros_like()) < 1e-10);
    }

    #[test]
    fn invariants_of_plane_wave() {
        let tau = 0.3;
        let (model, mut ws) = setup(1.0, tau);
        let s = model
            .state_from_fn(&mut ws, |x| Complex64::new(x.cos(), x.sin()))
            .unwrap();
        let inv = model.invariants(&mut ws, &s).unwrap();
        assert_relative_eq!(inv.mass, 2.0 * PI * (1.0 + tau), max_relative = 1e-14);
        assert_relative_eq!(inv.momentum, 2.0 * PI * (1.0 + tau), max_relative = 1e-14);
        assert_relative_eq!(inv.energy, PI, max_relative = 1e-13);
    }

    #[test]
    fn implicit_solve_residual_vanishes() {
        let (model, mut ws) = setup(2.0, 1e-4);
        let base = model
            .state_from_fn(&mut ws, |x| {
                Complex64::new(x.sin() + 0.2 * (3.0 * x).cos(), 0.7 * (2.0 * x).sin())
            })
            .unwrap();
        // push the auxiliaries off the manifold so every row is exercised
        let mut rhs = base.clone();
        rhs.nu.axpy(0.5, &base.w);
        rhs.omega.axpy(-0.3, &base.v);
        let z = Complex64::new(0.02, 0.9);
        let x = model.implicit_stage_solve(z, &rhs).unwrap();
        let grid = x.v.grid();
        let inv_tau = 1.0 / model.tau();
        for j in 0..grid.half_len() {
            let zik = z * Complex64::new(0.0, grid.wavenumber(j));
            let rv = x.v.coeff(j) + zik * x.omega.coeff(j) - rhs.v.coeff(j);
            let rw = x.w.coeff(j) - zik * x.nu.coeff(j) - rhs.w.coeff(j);
            let rn = x.nu.coeff(j) - zik * inv_tau * x.w.coeff(j) + z * inv_tau * x.omega.coeff(j)
                - rhs.nu.coeff(j);
            let ro = x.omega.coeff(j) + zik * inv_tau * x.v.coeff(j)
                - z * inv_tau * x.nu.coeff(j)
                - rhs.omega.coeff(j);
            let scale = 1.0
                + inv_tau
                    * (rhs.v.coeff(j).norm()
                        + rhs.w.coeff(j).norm()
                        + rhs.nu.coeff(j).norm()
                        + rhs.omega.coeff(j).norm());
            for (name, r) in [("v", rv), ("w", rw), ("nu", rn), ("omega", ro)] {
                assert!(r.norm() <= 1e-9 * scale, "{name} residual, mode {j}");
            }
        }
    }

    #[test]
    fn initialization_puts_auxiliaries_on_manifold() {
        let (model, mut ws) = setup(1.0, 0.1);
        let s = model
            .state_from_fn(&mut ws, |x| {
                Complex64::new((2.0 * x).cos(), 0.5 * (3.0 * x).sin())
            })
            .unwrap();
        let mut dn = s.nu.clone();
        dn.axpy(-1.0, &s.v.derivative(1));
        let mut dm = s.omega.clone();
        dm.axpy(-1.0, &s.w.derivative(1));
        assert!(dn.norm_l2() < 1e-14);
        assert!(dm.norm_l2() < 1e-14);
    }
}
