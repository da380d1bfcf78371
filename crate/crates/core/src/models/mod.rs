//! Semidiscrete wave models: BBM, KdV, NLS, and hyperbolized NLS.
//!
//! Every model provides the same surface: a state made of modal fields, a
//! right-hand side split into a non-stiff projected nonlinearity and a
//! stiff linear part, a mode-diagonal implicit stage solve for the stiff
//! part, and the three conserved functionals (mass, momentum, energy).
//!
//! Nonlinearities are evaluated through exact `L^2` projection (padded
//! grids, no aliasing), which is what makes the semidiscrete invariants
//! hold to machine precision rather than approximately.

mod bbm;
mod hypnls;
mod kdv;
mod linsolve;
mod nls;

pub use bbm::{BbmModel, BbmState};
pub use hypnls::{HypNlsModel, HypNlsState};
pub use kdv::{KdvModel, KdvState};
pub use nls::{NlsDiscretization, NlsModel, NlsState};

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{ModalField, SpectralError, Workspace};

/// The three conserved functionals of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantTriple {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("implicit stage matrix is singular at k = {k}, z = {z}")]
    SingularStage { k: f64, z: Complex64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Linear-space operations on solver states.
pub trait StateOps: Clone {
    /// `self += a * other`.
    fn axpy(&mut self, a: f64, other: &Self);
    /// `self *= a`.
    fn scale(&mut self, a: f64);
    /// Zero state on the same grid.
    fn zeros_like(&self) -> Self;
    /// `a + g * (b - a)`.
    fn lerp(a: &Self, b: &Self, g: f64) -> Self;
    /// Discrete `L^2` distance over all component fields.
    fn l2_distance(&self, other: &Self) -> f64;
}

macro_rules! impl_state_ops {
    ($state:ident, $($field:ident),+) => {
        impl crate::models::StateOps for $state {
            fn axpy(&mut self, a: f64, other: &Self) {
                $(self.$field.axpy(a, &other.$field);)+
            }

            fn scale(&mut self, a: f64) {
                $(self.$field.scale(a);)+
            }

            fn zeros_like(&self) -> Self {
                Self {
                    $($field: crate::spectral::ModalField::zeros(self.$field.grid()),)+
                }
            }

            fn lerp(a: &Self, b: &Self, g: f64) -> Self {
                Self {
                    $($field: crate::spectral::ModalField::lerp(&a.$field, &b.$field, g),)+
                }
            }

            fn l2_distance(&self, other: &Self) -> f64 {
                let mut sq: f64 = 0.0;
                $(
                    let mut d = self.$field.clone();
                    d.axpy(-1.0, &other.$field);
                    sq += d.inner_product(&d).expect("same grid");
                )+
                sq.max(0.0).sqrt()
            }
        }
    };
}
pub(crate) use impl_state_ops;

/// A split semidiscrete system `du/dt = nonstiff(u) + stiff(u)` with a
/// linear, mode-diagonal stiff part.
pub trait System {
    type State: StateOps;

    /// Non-stiff and stiff tangents at `s`, in that order.
    fn split_tangents(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<(Self::State, Self::State), ModelError>;

    /// Full tangent `nonstiff + stiff`.
    fn tangent(&self, ws: &mut Workspace, s: &Self::State) -> Result<Self::State, ModelError> {
        let (mut n, st) = self.split_tangents(ws, s)?;
        n.axpy(1.0, &st);
        Ok(n)
    }

    /// Solves `(I - z L) x = rhs` with `L` the stiff operator, one small
    /// dense system per stored mode.
    fn implicit_stage_solve(
        &self,
        z: Complex64,
        rhs: &Self::State,
    ) -> Result<Self::State, ModelError>;

    /// False only when the stiff part vanishes identically.
    fn has_stiff_part(&self) -> bool {
        true
    }
}

/// Models carrying the conserved triple.
pub trait Conserved: System {
    fn invariants(
        &self,
        ws: &mut Workspace,
        s: &Self::State,
    ) -> Result<InvariantTriple, ModelError>;

    /// The energy functional alone; the relaxation root solve calls this
    /// many times per step.
    fn energy(&self, ws: &mut Workspace, s: &Self::State) -> Result<f64, ModelError>;
}

/// `integral of u dx = L * mean(u)`.
pub(crate) fn total_integral(f: &ModalField) -> f64 {
    f.grid().length() * f.mean()
}
