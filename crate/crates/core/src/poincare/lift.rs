//! Constants and principal parts of the twisted theta lift of `F_m(z, s, -2k)`.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::{gamma_real, PoincareCombo};
use crate::error::{Error, Result};
use crate::numkernel::arith::{factorize, kronecker};
use crate::numkernel::{pi, HPComplex, PrecCtx};
use crate::quadforms::TwistParams;

/// Which of the two lifts (`Λᵉ` weight `3/2 + k`, `Λᵒ` weight `1/2 - k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_k(k: i64) -> Self {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Variant of the last product in `Cᵒ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddConstant {
    /// `∏_{j=0}^{(k-1)/2} (s/2 - 1/2 + j)`, what iterating the lowering relation gives.
    Corrected,
    /// `∏_{j=0}^{(k-1)/2} (s/2 - 1/2 - j)`.
    Printed,
}

/// One aggregated principal-part term `coeff · q^{exponent} 𝔢_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalTerm {
    pub exponent: Rational,
    pub h: i64,
    pub coeff: HPComplex,
}

fn fpow(base: f64, e: f64, w: u32) -> Float {
    (Float::with_val(w, base).ln() * Float::with_val(w, e)).exp()
}

fn conj_epsilon(tw: &TwistParams, w: u32) -> HPComplex {
    tw.epsilon(w).conj()
}

/// `Cᵉ` for the weight `-2k` series of index `m`.
pub fn lift_constant_even(k: i64, s: f64, m: u64, n: i64, tw: &TwistParams, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    let kf = k as f64;
    let mut c = Float::with_val(w, 2.0 * s + 2.0 * kf - 1.0).exp2();
    c *= fpow(m as f64, 2.0 * kf + 1.0, w);
    c *= (pi(w).ln() * Float::with_val(w, (3.0 * kf - 1.0) / 2.0)).exp();
    c *= fpow(tw.delta.abs() as f64, (kf + 1.0) / 2.0, w);
    c /= fpow(n as f64, kf / 2.0, w);
    c *= gamma_real(s / 2.0 + 1.0, ctx);
    c /= gamma_real(2.0 * s, ctx);
    for j in 0..k {
        c *= Float::with_val(w, s + (j - k) as f64);
    }
    for j in 0..k / 2 {
        c *= Float::with_val(w, s / 2.0 + 1.0 + j as f64);
    }
    conj_epsilon(tw, w).scale(&(-c))
}

fn odd_last_factor(s: f64, j: i64, variant: OddConstant) -> f64 {
    match variant {
        OddConstant::Corrected => s / 2.0 - 0.5 + j as f64,
        OddConstant::Printed => s / 2.0 - 0.5 - j as f64,
    }
}

/// `Cᵒ`, multiplied out directly.
pub fn lift_constant_odd(k: i64, s: f64, n: i64, tw: &TwistParams, variant: OddConstant, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    let kf = k as f64;
    let mut c = Float::with_val(w, 2.0 * kf - s).exp2();
    c /= fpow(tw.delta.abs() as f64, kf / 2.0, w);
    c /= gamma_real(s / 2.0 + 0.5, ctx);
    c *= fpow(n as f64, (kf + 1.0) / 2.0, w);
    c *= (pi(w).ln() * Float::with_val(w, kf / 2.0)).exp();
    c *= Float::with_val(w, s);
    for j in 0..k {
        c *= Float::with_val(w, s + (j - k) as f64);
    }
    for j in 0..=(k - 1) / 2 {
        c *= Float::with_val(w, odd_last_factor(s, j, variant));
    }
    conj_epsilon(tw, w).scale(&(-c))
}

/// `Cᵒ` evaluated as `±exp(Σ log|factor|)`, an independent path for cross-checks.
pub fn lift_constant_odd_log(
    k: i64,
    s: f64,
    n: i64,
    tw: &TwistParams,
    variant: OddConstant,
    ctx: &PrecCtx,
) -> HPComplex {
    let w = ctx.working();
    let kf = k as f64;
    let ln2 = Float::with_val(w, 2).ln();
    let ln_pi = pi(w).ln();
    let mut negative = true;
    let mut log = Float::with_val(w, &ln2 * Float::with_val(w, 2.0 * kf - s));
    log -= Float::with_val(w, tw.delta.abs()).ln() * Float::with_val(w, kf / 2.0);
    log -= Float::with_val(w, s / 2.0 + 0.5).ln_gamma();
    log += Float::with_val(w, n).ln() * Float::with_val(w, (kf + 1.0) / 2.0);
    log += ln_pi * Float::with_val(w, kf / 2.0);
    let factors = std::iter::once(s)
        .chain((0..k).map(|j| s + (j - k) as f64))
        .chain((0..=(k - 1) / 2).map(|j| odd_last_factor(s, j, variant)));
    for f in factors {
        if f < 0.0 {
            negative = !negative;
        }
        log += Float::with_val(w, f.abs()).ln();
    }
    let mut c = log.exp();
    if negative {
        c = -c;
    }
    conj_epsilon(tw, w).scale(&c)
}

/// `Cᵉ` for even `k`, the corrected `Cᵒ` for odd `k`.
pub fn lift_constants(k: i64, s: f64, m: u64, n: i64, tw: &TwistParams, ctx: &PrecCtx) -> HPComplex {
    match Parity::of_k(k) {
        Parity::Even => lift_constant_even(k, s, m, n, tw, ctx),
        Parity::Odd => lift_constant_odd(k, s, n, tw, OddConstant::Corrected, ctx),
    }
}

/// Action of `W_Q^N` on `ℤ/2N`: multiplication by `w` with `w ≡ -1` modulo the
/// `Q`-primary part of `2N` and `w ≡ 1` modulo the rest.
pub fn al_multiplier(n: i64, q: i64) -> i64 {
    let two_n = 2 * n;
    let q_part: i64 = factorize(two_n as u64)
        .into_iter()
        .filter(|&(p, _)| q % p as i64 == 0)
        .map(|(p, e)| (p as i64).pow(e))
        .product();
    let rest = two_n / q_part;
    (0..two_n)
        .find(|w| (w + 1) % q_part == 0 && (w - 1).rem_euclid(rest) == 0)
        .expect("CRT solution exists")
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// Principal part of the lift of a Poincaré combination of weight `-2k`.
///
/// A term `c · F_m|W_Q` contributes
/// `C · c · Σ_{n|m} (Δ/n) n^e q^{-m²|Δ|/(4Nn²)} (𝔢_{wrm/n} + sgn(Δ) 𝔢_{-wrm/n})`
/// with `e = k` for the odd lift and `e = -(k+1)` for the even one, `w` the
/// multiplier of `W_Q`. Terms are aggregated by `(exponent, h)` and sorted.
pub fn lift_principal_part(
    combo: &PoincareCombo,
    tw: &TwistParams,
    parity: Parity,
    ctx: &PrecCtx,
) -> Result<Vec<PrincipalTerm>> {
    let w = ctx.working();
    let weight = combo.weight();
    if weight > 0 || weight % 2 != 0 {
        return Err(Error::InvalidInput(format!("lift needs weight -2k <= 0, got {weight}")));
    }
    let k = -weight / 2;
    let n = combo.level();
    let two_n = 2 * n;
    let mut acc: BTreeMap<(Rational, i64), HPComplex> = BTreeMap::new();
    for (coeff, spec) in &combo.terms {
        let c = match parity {
            Parity::Even => lift_constant_even(k, spec.s, spec.m, n, tw, ctx),
            Parity::Odd => lift_constant_odd(k, spec.s, n, tw, OddConstant::Corrected, ctx),
        };
        let c = &c * &coeff.to_complex(w);
        let mult = al_multiplier(n, spec.al_word.unwrap_or(1));
        for nd in divisors(spec.m) {
            let chi = kronecker(tw.delta, nd as i64);
            if chi == 0 {
                continue;
            }
            let npow = match parity {
                Parity::Odd => Rational::from(Integer::from(nd).pow(k as u32)),
                Parity::Even => Rational::from((1, Integer::from(nd).pow((k + 1) as u32))),
            };
            let scale = Float::with_val(w, &npow) * chi;
            let term = c.scale(&scale);
            let mm = spec.m / nd;
            let m2 = Integer::from(spec.m).pow(2u32);
            let den = Integer::from(nd).pow(2u32) * 4 * n;
            let exponent = -Rational::from((m2 * tw.delta.abs(), den));
            let h = (mult * tw.r * mm as i64).rem_euclid(two_n);
            let hm = (-h).rem_euclid(two_n);
            let signed = if tw.delta < 0 { -term.clone() } else { term.clone() };
            for (hh, t) in [(h, term), (hm, signed)] {
                let key = (exponent.clone(), hh);
                let slot = acc.entry(key).or_insert_with(|| HPComplex::zero(w));
                *slot += &t;
            }
        }
    }
    let largest = acc.values().map(|v| v.abs()).fold(Float::new(w), |a, b| a.max(&b));
    let cutoff = largest * ctx.rel_eps(16);
    Ok(acc
        .into_iter()
        .filter(|(_, v)| v.abs() > cutoff)
        .map(|((exponent, h), coeff)| PrincipalTerm { exponent, h, coeff })
        .collect())
}

/// Factor relating the `(m, h)` holomorphic coefficient of the odd lift to the trace:
/// `(1/(4πm))^{(k+1)/2} ∏_{j=0}^{(k-1)/2} (k/2 + j)(j - (k+1)/2)`.
pub fn odd_coefficient_factor(k: i64, m: &Rational, ctx: &PrecCtx) -> Float {
    let w = ctx.working();
    let four_pi_m = pi(w) * 4u32 * Float::with_val(w, m);
    let mut f = Float::with_val(w, four_pi_m.recip().ln() * Float::with_val(w, (k + 1) as f64 / 2.0)).exp();
    for j in 0..=(k - 1) / 2 {
        f *= Float::with_val(w, k as f64 / 2.0 + j as f64);
        f *= Float::with_val(w, j as f64 - (k + 1) as f64 / 2.0);
    }
    f
}

/// `(-4πm)^{k/2}` for the even lift (real for `k ≡ 0 mod 4`, purely imaginary otherwise).
pub fn even_coefficient_factor(k: i64, m: &Rational, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    let four_pi_m = pi(w) * 4u32 * Float::with_val(w, m);
    let base = HPComplex::from_real(-four_pi_m);
    base.sqrt().powi(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::{Coeff, PoincareSpec};

    fn ctx() -> PrecCtx {
        PrecCtx::new(128)
    }

    fn pattern(c: i64, m: u64, s: f64, k: i64, signs: [i64; 4]) -> PoincareCombo {
        let q = [1, 2, 3, 6];
        PoincareCombo::new(
            (0..4)
                .map(|i| (Coeff::int(c * signs[i]), PoincareSpec::new(m, s, k, 6).with_al(q[i])))
                .collect(),
        )
        .unwrap()
    }

    fn as_table(pp: &[PrincipalTerm], scale: &HPComplex) -> Vec<(Rational, i64, f64, f64)> {
        let inv = scale.recip();
        pp.iter()
            .map(|t| {
                let v = &t.coeff * &inv;
                (t.exponent.clone(), t.h, v.re.to_f64(), v.im.to_f64())
            })
            .collect()
    }

    #[test]
    fn multipliers_for_level_six() {
        assert_eq!(al_multiplier(6, 1), 1);
        assert_eq!(al_multiplier(6, 2), 7);
        assert_eq!(al_multiplier(6, 3), 5);
        assert_eq!(al_multiplier(6, 6), 11);
        for q in [1, 2, 3, 6] {
            let w = al_multiplier(6, q);
            assert_eq!((w * w) % 12, 1);
        }
    }

    #[test]
    fn even_constant_at_weight_zero() {
        let tw = TwistParams::new(-23, 1, 6).unwrap();
        let c = lift_constant_even(0, 1.0, 1, 6, &tw, &ctx());
        let want = Float::with_val(192, 23).sqrt();
        assert!(c.re.clone().abs() < 1e-35);
        assert!((c.im - want).abs() < 1e-35);

        let real = lift_constant_even(0, 1.0, 1, 6, &TwistParams::untwisted(), &ctx());
        assert!(real.im.is_zero());
    }

    #[test]
    fn odd_constant_two_paths() {
        let tw = TwistParams::untwisted();
        let ctx = ctx();
        for variant in [OddConstant::Corrected, OddConstant::Printed] {
            let a = lift_constant_odd(13, 14.0, 6, &tw, variant, &ctx);
            let b = lift_constant_odd_log(13, 14.0, 6, &tw, variant, &ctx);
            let rel = (&a - &b).abs() / a.abs();
            assert!(rel < ctx.rel_eps(8), "{variant:?}: {rel}");
        }
        let a = lift_constant_odd(13, 14.0, 6, &tw, OddConstant::Corrected, &ctx);
        let b = lift_constant_odd(13, 14.0, 6, &tw, OddConstant::Printed, &ctx);
        // ∏(6.5+j) / ∏(6.5-j), j = 0..6
        let ratio = Float::with_val(192, &a.re / &b.re);
        let want = (0..7).map(|j| 6.5 + j as f64).product::<f64>() / (0..7).map(|j| 6.5 - j as f64).product::<f64>();
        assert!((ratio.to_f64() / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mock_theta_principal_part() {
        let tw = TwistParams::new(-23, 1, 6).unwrap();
        let combo = pattern(1, 1, 1.0, 0, [1, 1, -1, -1]);
        let pp = lift_principal_part(&combo, &tw, Parity::Even, &ctx()).unwrap();
        let unit = HPComplex::i(192).scale(&Float::with_val(192, 23).sqrt());
        let e = Rational::from((-23, 24));
        assert_eq!(
            as_table(&pp, &unit),
            vec![
                (e.clone(), 1, 2.0, 0.0),
                (e.clone(), 5, -2.0, 0.0),
                (e.clone(), 7, 2.0, 0.0),
                (e, 11, -2.0, 0.0)
            ]
        );
    }

    #[test]
    fn eta25_principal_parts() {
        let tw = TwistParams::untwisted();
        let ctx = ctx();
        let co = lift_constant_odd(13, 14.0, 6, &tw, OddConstant::Corrected, &ctx);
        let f = pattern(1, 5, 14.0, -26, [-1, 1, 1, -1]);
        let pp = lift_principal_part(&f, &tw, Parity::Odd, &ctx).unwrap();
        let big = 5f64.powi(13);
        let (a, b) = (Rational::from((-25, 24)), Rational::from((-1, 24)));
        assert_eq!(
            as_table(&pp, &co),
            vec![
                (a.clone(), 1, 2.0, 0.0),
                (a.clone(), 5, -2.0, 0.0),
                (a.clone(), 7, -2.0, 0.0),
                (a, 11, 2.0, 0.0),
                (b.clone(), 1, -2.0 * big, 0.0),
                (b.clone(), 5, 2.0 * big, 0.0),
                (b.clone(), 7, 2.0 * big, 0.0),
                (b, 11, -2.0 * big, 0.0),
            ]
        );

        let ft = pattern(25 + 5i64.pow(13), 1, 14.0, -26, [1, -1, -1, 1]);
        let pp = lift_principal_part(&ft, &tw, Parity::Odd, &ctx).unwrap();
        let c = 2.0 * (25.0 + big);
        let b = Rational::from((-1, 24));
        assert_eq!(
            as_table(&pp, &co),
            vec![
                (b.clone(), 1, c, 0.0),
                (b.clone(), 5, -c, 0.0),
                (b.clone(), 7, -c, 0.0),
                (b, 11, c, 0.0),
            ]
        );
    }

    #[test]
    fn coefficient_factors() {
        let ctx = ctx();
        assert_eq!(even_coefficient_factor(0, &Rational::from((1, 24)), &ctx).re, 1);
        // k = 1: (1/(4πm)) · (1/2)(-1)
        let m = Rational::from((23, 24));
        let got = odd_coefficient_factor(1, &m, &ctx).to_f64();
        let want = -0.5 / (4.0 * std::f64::consts::PI * 23.0 / 24.0);
        assert!((got / want - 1.0).abs() < 1e-15);
    }
}
