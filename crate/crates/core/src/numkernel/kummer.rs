//! Kummer's confluent hypergeometric series `M(a, b, y) = 1F1(a; b; y)`.

use rug::Float;

use super::prec::{log2_abs, PrecCtx};
use crate::error::{Error, Result};

/// Number of precision doublings allowed before giving up.
pub const DEFAULT_ESCALATION_CEILING: u32 = 4;

const MAX_TERMS: usize = 200_000;

/// `M(a, b, y)` rounded to `ctx.prec_bits`.
///
/// The series is summed at working precision while the largest term is
/// tracked. If `log2(max term / |result|)` exceeds the guard bits the sum is
/// redone at doubled working precision, up to
/// [`DEFAULT_ESCALATION_CEILING`] times.
pub fn kummer_m(a: &Float, b: &Float, y: &Float, ctx: &PrecCtx) -> Result<Float> {
    kummer_m_with_ceiling(a, b, y, ctx, DEFAULT_ESCALATION_CEILING)
}

pub fn kummer_m_with_ceiling(a: &Float, b: &Float, y: &Float, ctx: &PrecCtx, ceiling: u32) -> Result<Float> {
    if b.is_integer() && *b <= 0 {
        return Err(Error::InvalidInput(format!(
            "kummer_m: b = {} is a non-positive integer",
            b.to_f64()
        )));
    }
    if *y < 0 {
        return Err(Error::InvalidInput("kummer_m: y must be non-negative".into()));
    }
    let mut run = *ctx;
    for _ in 0..=ceiling {
        let (sum, lost_bits) = series(a, b, y, run.working())?;
        if lost_bits <= run.guard_bits as f64 {
            return Ok(Float::with_val(ctx.prec_bits, sum));
        }
        run = run.escalated();
    }
    Err(Error::NonConvergent(format!(
        "kummer_m(a={}, b={}, y={}): cancellation exceeds {} escalations",
        a.to_f64(),
        b.to_f64(),
        y.to_f64(),
        ceiling
    )))
}

/// Returns the partial sum and the number of bits lost to cancellation.
fn series(a: &Float, b: &Float, y: &Float, prec: u32) -> Result<(Float, f64)> {
    let a = Float::with_val(prec, a);
    let b = Float::with_val(prec, b);
    let y = Float::with_val(prec, y);
    let mut term = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    let mut max_log = 0f64;
    if y.is_zero() {
        return Ok((sum, 0.0));
    }
    for j in 0..MAX_TERMS {
        let aj = Float::with_val(prec, &a + j as u32);
        let bj = Float::with_val(prec, &b + j as u32);
        term *= &aj;
        term *= &y;
        term /= &bj;
        term /= (j + 1) as u32;
        if term.is_zero() {
            // (a)_j vanishes for non-positive integer a: the series is a polynomial.
            break;
        }
        sum += &term;
        let tl = log2_abs(&term);
        max_log = max_log.max(tl);
        // Stop only once terms are shrinking geometrically and negligible.
        let ratio = (aj.to_f64().abs() + 1.0) * y.to_f64() / (bj.to_f64().abs() * (j + 2) as f64);
        if ratio < 0.5 && tl < log2_abs(&sum) - prec as f64 - 2.0 {
            let lost = max_log - log2_abs(&sum);
            return Ok((sum, lost.max(0.0)));
        }
    }
    if let Some(lost) = polynomial_loss(&a, &sum, max_log) {
        return Ok((sum, lost));
    }
    Err(Error::NonConvergent(format!(
        "kummer_m: no convergence within {MAX_TERMS} terms"
    )))
}

fn polynomial_loss(a: &Float, sum: &Float, max_log: f64) -> Option<f64> {
    (a.is_integer() && *a <= 0).then(|| (max_log - log2_abs(sum)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(prec: u32, x: f64) -> Float {
        Float::with_val(prec, x)
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b).abs();
        (d / Float::with_val(a.prec(), b.clone().abs())).to_f64()
    }

    #[test]
    fn zero_argument_gives_one() {
        let ctx = PrecCtx::new(128);
        let m = kummer_m(&f(128, 3.5), &f(128, 7.0), &f(128, 0.0), &ctx).unwrap();
        assert_eq!(m, 1);
    }

    #[test]
    fn equal_parameters_give_exponential() {
        let ctx = PrecCtx::new(128);
        for y in [0.5, 3.0, 25.0, 80.0] {
            let yv = f(192, y);
            let m = kummer_m(&f(192, 6.0), &f(192, 6.0), &yv, &ctx).unwrap();
            assert!(rel(&m, &yv.exp()) < 1e-36);
        }
    }

    #[test]
    fn m_1_2_closed_form() {
        let ctx = PrecCtx::new(128);
        let y = f(192, 3.0);
        let m = kummer_m(&f(192, 1.0), &f(192, 2.0), &y, &ctx).unwrap();
        let expected = (y.clone().exp() - 1u32) / &y;
        assert!(rel(&m, &expected) < 1e-36);
    }

    #[test]
    fn cancellation_triggers_escalation_not_silent_loss() {
        // M(-30.5, 1, 60) alternates with huge terms relative to the result.
        let ctx = PrecCtx::new(64);
        let lo = kummer_m(&f(64, -30.5), &f(64, 1.0), &f(64, 60.0), &ctx).unwrap();
        let hi = kummer_m(&f(64, -30.5), &f(64, 1.0), &f(64, 60.0), &PrecCtx::new(256)).unwrap();
        assert!(rel(&lo, &Float::with_val(64, &hi)) < 1e-17);
    }

    #[test]
    fn ceiling_is_enforced() {
        let ctx = PrecCtx::with_guard(53, 0);
        let r = kummer_m_with_ceiling(&f(64, -200.5), &f(64, 1.0), &f(64, 400.0), &ctx, 0);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn contiguous_relation(a in 1.0f64..20.0, b in 1.0f64..20.0, y in 1.0f64..20.0) {
            let ctx = PrecCtx::new(128);
            let p = ctx.working();
            let (a, b, y) = (f(p, a), f(p, b), f(p, y));
            let a1 = Float::with_val(p, &a - 1u32);
            let b1 = Float::with_val(p, &b + 1u32);
            let m = kummer_m(&a, &b, &y, &ctx).unwrap();
            let m_a1 = kummer_m(&a1, &b, &y, &ctx).unwrap();
            let m_b1 = kummer_m(&a, &b1, &y, &ctx).unwrap();
            let t1 = Float::with_val(p, &b * &m);
            let t2 = Float::with_val(p, &b * &m_a1);
            let t3 = Float::with_val(p, &y * &m_b1);
            let resid = Float::with_val(p, &t1 - &t2) - &t3;
            let scale = Float::with_val(p, t1.abs_ref());
            prop_assert!(resid.abs() <= scale * ctx.rel_eps(8));
        }

        #[test]
        fn doubling_precision_is_stable(a in 0.5f64..20.0, b in 0.5f64..20.0, y in 0.0f64..60.0) {
            let c1 = PrecCtx::new(128);
            let c2 = PrecCtx::new(256);
            let (a, b, y) = (f(256, a), f(256, b), f(256, y));
            let m1 = kummer_m(&a, &b, &y, &c1).unwrap();
            let m2 = kummer_m(&a, &b, &y, &c2).unwrap();
            let d = Float::with_val(256, &m1 - &m2).abs();
            prop_assert!(d <= Float::with_val(256, m2.abs_ref()) * c1.rel_eps(4));
        }
    }
}
