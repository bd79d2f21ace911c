//! Twisted traces of CM values of modular functions and Maass-Poincaré series
//! on Γ₀(N), with exact q-series oracles to check them against.

pub mod error;
pub mod modeval;
pub mod numkernel;
pub mod poincare;
pub mod qseries;
pub mod quadforms;
pub mod traces;
pub mod verify;

pub use error::{Error, Result};
pub use numkernel::{HPComplex, PrecCtx};
