//! Additive (implicit-explicit) Runge-Kutta time integration.
//!
//! The built-in schemes are the Kennedy-Carpenter ARK4(3)6L[2]SA and
//! ARK5(4)8L[2]SA pairs, whose implicit halves are L-stable ESDIRK
//! methods, plus classical RK4 for fully explicit problems. Tableaux can
//! also be loaded from plain-text files; every tableau is validated
//! against the order conditions before use.

mod stepper;
mod tableau;

pub use stepper::{ark_step, integrate};
pub use tableau::{ArkTableau, TableauError};
