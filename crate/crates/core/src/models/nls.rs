use num_complex::Complex64;

use crate::models::{impl_state_ops, Conserved, InvariantTriple, ModelError, System};
use crate::spectral::{dealias_grid_size, ModalField, SpectralGrid, Workspace};

/// How the cubic term is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlsDiscretization {
    /// Exact `L^2` projection on a padded grid; conserves the invariants.
    Galerkin,
    /// Nodal evaluation on the collocation points, aliasing included.
    Collocation,
}

/// Cubic Schroedinger equation `i u_t + u_xx + beta |u|^2 u = 0`, split
/// into real and imaginary parts `u = v + i w`:
///
/// ```text
/// v_t = -w_xx - beta P((v^2 + w^2) w)
/// w_t =  v_xx + beta P((v^2 + w^2) v)
/// ```
///
/// The Laplacian pair is stiff and couples `(v_k, w_k)` through a 2 x 2
/// rotation block per mode; the cubic terms are non-stiff.
///
/// Conserved functionals: mass `int (v^2 + w^2)`, momentum
/// `2 int v w_x`, and energy
/// `int (v_x^2 + w_x^2 - (beta/2) (v^2 + w^2)^2)`.
pub struct NlsModel {
    grid: SpectralGrid,
    beta: f64,
    discretization: NlsDiscretization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlsState {
    pub v: ModalField,
    pub w: ModalField,
}

impl_state_ops!(NlsState, v, w);

impl NlsModel {
    pub fn new(grid: SpectralGrid, beta: f64) -> Self {
        Self {
            grid,
            beta,
            discretization: NlsDiscretization::Galerkin,
        }
    }

    pub fn with_discretization(mut self, discretization: NlsDiscretization) -> Self {
        self.discretization = discretization;
        self
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn discretization(&self) -> NlsDiscretization {
        self.discretization
    }

    /// Samples a complex-valued function into `(v, w)`.
    pub fn state_from_fn(
        &self,
        ws: &mut Workspace,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<NlsState, ModelError> {
        let nodes = self.grid.nodes();
        let vv: Vec<f64> = nodes.iter().map(|&x| f(x).re).collect();
        let wv: Vec<f64> = nodes.iter().map(|&x| f(x).im).collect();
        Ok(NlsState {
            v: ws.forward(self.grid, &vv)?,
            w: ws.forward(self.grid, &wv)?,
        })
    }

    /// `(P((v^2+w^2) w), P((v^2+w^2) v))`, sharing one padded evaluation.
    fn cubic_terms(
        &self,
        ws: &mut Workspace,
        s: &NlsState,
    ) -> Result<(ModalField, ModalField), ModelError> {
        let m = match self.discretization {
            NlsDiscretization::Galerkin => dealias_grid_size(self.grid.n(), 3),
            NlsDiscretization::Collocation => self.grid.n(),
        };
        let vv = ws.evaluate(&s.v, m)?;
        let wv = ws.evaluate(&s.w, m)?;
        let mut cube_w = vec![0.0; m];
        let mut cube_v = vec![0.0; m];
        for i in 0..m {
            let sq = vv[i] * vv[i] + wv[i] * wv[i];
            cube_w[i] = sq * wv[i];
            cube_v[i] = sq * vv[i];
        }
        let pw = ws.project_samples(self.grid, &cube_w)?;
        let pv = ws.project_samples(self.grid, &cube_v)?;
        Ok((pw, pv))
    }
}

impl System for NlsModel {
    type State = NlsState;

    fn split_tangents(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<(Self::State, Self::State), ModelError> {
        let (mut cube_w, mut cube_v) = self.cubic_terms(ws, s)?;
        cube_w.scale(-self.beta);
        cube_v.scale(self.beta);
        let nonstiff = NlsState {
            v: cube_w,
            w: cube_v,
        };
        // -w_xx and +v_xx: multiply by +k^2 and -k^2
        let stiff = NlsState {
            v: s.w.apply_symbol(|k| Complex64::new(k * k, 0.0))?,
            w: s.v.apply_symbol(|k| Complex64::new(-k * k, 0.0))?,
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
        let mut v = Vec::with_capacity(half);
        let mut w = Vec::with_capacity(half);
        for j in 0..half {
            let k = grid.wavenumber(j);
            let k2 = k * k;
            // [[1, -z k^2], [z k^2, 1]] (v, w) = (rv, rw)
            let det = Complex64::new(1.0, 0.0) + z * z * k2 * k2;
            if det.norm() <= 1e-14 * (1.0 + (z.norm() * k2).powi(2)) {
                return Err(ModelError::SingularStage { k, z });
            }
            let rv = rhs.v.coeff(j);
            let rw = rhs.w.coeff(j);
            v.push((rv + z * k2 * rw) / det);
            w.push((rw - z * k2 * rv) / det);
        }
        Ok(NlsState {
            v: ModalField::from_coeffs_unchecked(grid, v),
            w: ModalField::from_coeffs_unchecked(grid, w),
        })
    }
}

impl Conserved for NlsModel {
    fn invariants(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<InvariantTriple, ModelError> {
        let mass = s.v.inner_product(&s.v)? + s.w.inner_product(&s.w)?;
        let momentum = 2.0 * s.v.inner_product(&s.w.derivative(1))?;
        Ok(InvariantTriple {
            mass,
            momentum,
            energy: self.energy(ws, s)?,
        })
    }

    fn energy(&self, ws: &mut Workspace, s: &Self::State) -> Result<f64, ModelError> {
        let vx = s.v.derivative(1);
        let wx = s.w.derivative(1);
        let gradient = vx.inner_product(&vx)? + wx.inner_product(&wx)?;
        let quartic = ws.integral_of_nonlinearity(&[&s.v, &s.w], 4, |a| {
            let sq = a[0] * a[0] + a[1] * a[1];
            sq * sq
        })?;
        Ok(gradient - 0.5 * self.beta * quartic)
    }
}
