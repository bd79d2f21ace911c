use rug::{Float, Integer};

use super::prec::PrecCtx;

/// `Γ(two_x / 2)` in closed form, rounded to `ctx.prec_bits`.
///
/// Integer arguments use `(x-1)!`; half-integers `m + 1/2` use
/// `(2m)! √π / (4^m m!)`.
pub fn gamma_half(two_x: u32, ctx: &PrecCtx) -> Float {
    assert!(two_x >= 1, "gamma_half needs a positive argument");
    let w = ctx.working();
    let v = if two_x.is_multiple_of(2) {
        let n = two_x / 2;
        Float::with_val(w, &Integer::from(Integer::factorial(n - 1)))
    } else {
        let m = (two_x - 1) / 2;
        let num = Integer::from(Integer::factorial(2 * m));
        let den = Integer::from(Integer::factorial(m)) << (2 * m);
        let sqrt_pi = ctx.pi().sqrt();
        Float::with_val(w, &num) * sqrt_pi / Float::with_val(w, &den)
    };
    Float::with_val(ctx.prec_bits, v)
}

/// Pochhammer symbol `(a)_n` at the precision of `a`.
pub fn pochhammer(a: &Float, n: u32) -> Float {
    let mut acc = Float::with_val(a.prec(), 1);
    for j in 0..n {
        acc *= Float::with_val(a.prec(), a + j);
    }
    acc
}
