//! Bifractional displacement operators, bifractional coherent states and the
//! family of phase-space functions that interpolates between the Weyl and
//! Wigner functions.
//!
//! Units have ħ = 1, `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`.

pub mod error;
pub mod format;
pub mod quadrature;
pub mod fracft;
pub mod fock;
pub mod bifrac;
pub mod states;
pub mod phasespace;
pub mod verify;

pub use error::{Error, Result};
