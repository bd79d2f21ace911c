//! Shared inputs for the criterion benches.

use cmtrace::{HPComplex, PrecCtx};
use rug::Float;

/// Point `x + iy` at the working precision of `ctx`.
pub fn point(x: f64, y: f64, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    HPComplex::new(Float::with_val(w, x), Float::with_val(w, y))
}

/// Precisions exercised by the benches.
pub const PRECISIONS: [u32; 2] = [128, 256];
