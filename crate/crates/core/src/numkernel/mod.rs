//! Numeric kernel: precision handling, complex numbers and special functions.

pub mod arith;
pub mod complex;
pub mod gamma;
pub mod kummer;
pub mod prec;
pub mod sum;

pub use arith::{egcd, gcd, kronecker, sigma};
pub use complex::{pi, DecimalComplex, HPComplex};
pub use gamma::gamma_half;
pub use kummer::kummer_m;
pub use prec::PrecCtx;
pub use sum::{CompensatedComplexSum, CompensatedSum};
