use rug::Float;
use serde::{Deserialize, Serialize};

use super::QuadForm;
use crate::error::{Error, Result};
use crate::numkernel::arith::{gcd, is_fundamental_discriminant, kronecker, prime_discriminants};
use crate::numkernel::HPComplex;

pub const DEFAULT_SEARCH_BOUND: i64 = 50;
const SEARCH_ESCALATIONS: u32 = 3;

/// Twist data `(Δ, r)` with `r² ≡ Δ (mod 4N)`; `ε` is 1 for `Δ > 0` and `i` for `Δ < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistParams {
    pub delta: i64,
    pub r: i64,
}

impl TwistParams {
    pub fn new(delta: i64, r: i64, n: i64) -> Result<Self> {
        if !is_fundamental_discriminant(delta) {
            return Err(Error::InvalidDiscriminant(
                delta,
                "not a fundamental discriminant".into(),
            ));
        }
        if (r * r - delta).rem_euclid(4 * n) != 0 {
            return Err(Error::InvalidInput(format!(
                "r={r} does not satisfy r^2 = {delta} mod {}",
                4 * n
            )));
        }
        Ok(Self { delta, r })
    }

    pub fn untwisted() -> Self {
        Self { delta: 1, r: 1 }
    }

    pub fn sign(&self) -> i64 {
        self.delta.signum()
    }

    pub fn epsilon(&self, prec: u32) -> HPComplex {
        if self.delta > 0 {
            HPComplex::one(prec)
        } else {
            HPComplex::i(prec)
        }
    }

    /// `√|Δ|` at the given precision.
    pub fn sqrt_abs_delta(&self, prec: u32) -> Float {
        Float::with_val(prec, self.delta.abs()).sqrt()
    }
}

/// Whether `χ_Δ(Q)` can be nonzero: `Δ | disc`, `disc/Δ` a square mod `4N`, and
/// `gcd(a/N, b, c, Δ) = 1`.
fn admissible(q: &QuadForm, delta: i64, n: i64) -> bool {
    let disc = q.disc();
    if disc % delta != 0 {
        return false;
    }
    let quot = disc / delta;
    let m = 4 * n;
    if !(0..m).any(|x| (x * x - quot).rem_euclid(m) == 0) {
        return false;
    }
    gcd(gcd(gcd(q.a / n, q.b), q.c), delta) == 1
}

/// Generalized genus character via a represented value prime to `Δ`.
pub fn genus_char(q: &QuadForm, tw: &TwistParams, n: i64) -> Result<i32> {
    genus_char_with_bound(q, tw, n, DEFAULT_SEARCH_BOUND)
}

/// As [`genus_char`] with an explicit initial grid bound (escalated ×4 on failure).
pub fn genus_char_with_bound(q: &QuadForm, tw: &TwistParams, n: i64, bound: i64) -> Result<i32> {
    if tw.delta == 1 {
        return Ok(1);
    }
    if !admissible(q, tw.delta, n) {
        return Ok(0);
    }
    let mut bound = bound;
    for _ in 0..=SEARCH_ESCALATIONS {
        if let Some(v) = smallest_coprime_value(q, tw.delta, bound) {
            return Ok(kronecker(tw.delta, v));
        }
        bound *= 4;
    }
    Err(Error::NoRepresentativeFound {
        form: q.to_string(),
        delta: tw.delta,
    })
}

/// Represented value of smallest absolute value coprime to `Δ` on the grid.
pub(crate) fn smallest_coprime_value(q: &QuadForm, delta: i64, bound: i64) -> Option<i64> {
    represented_coprime_values(q, delta, bound).min_by_key(|v| (v.abs(), *v < 0))
}

pub(crate) fn represented_coprime_values(q: &QuadForm, delta: i64, bound: i64) -> impl Iterator<Item = i64> + '_ {
    (-bound..=bound)
        .flat_map(move |x| (-bound..=bound).map(move |y| q.value(x, y)))
        .filter(move |&v| v != 0 && gcd(v, delta) == 1)
}

/// Genus character through a factorization `Δ = Δ₁Δ₂`, `N = N₁N₂`.
///
/// The form is read as `[a', b, N c']` with `a' = c` and `c' = a/N`, which
/// represents the same integers as `Q`.
pub fn genus_char_gkz(q: &QuadForm, tw: &TwistParams, n: i64) -> i32 {
    if tw.delta == 1 {
        return 1;
    }
    if !admissible(q, tw.delta, n) {
        return 0;
    }
    let (ap, cp) = (q.c, q.a / n);
    let primes = prime_discriminants(tw.delta);
    let divisors_n: Vec<i64> = (1..=n).filter(|k| n % k == 0).collect();
    for mask in 0u32..(1 << primes.len()) {
        let d1: i64 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| *p)
            .product();
        let d2 = tw.delta / d1;
        for &n1 in &divisors_n {
            let n2 = n / n1;
            if gcd(d1, n1 * ap) == 1 && gcd(d2, n2 * cp) == 1 {
                return kronecker(d1, n1 * ap) * kronecker(d2, n2 * cp);
            }
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::tests::gamma0_matrix;
    use crate::quadforms::{enumerate_classes, SignMode};
    use proptest::prelude::*;

    /// (Δ, r, N, d, h) data whose class sets are used below.
    const CASES: &[(i64, i64, i64, i64, i64)] = &[
        (-23, 1, 6, 1, 1),
        (-23, 1, 6, 1, 5),
        (-23, 1, 6, 1, 7),
        (-47, 1, 6, 1, 11),
        (-71, 1, 6, 1, 1),
        (-95, 1, 6, 1, 7),
        (5, 1, 1, 3, 1),
        (-4, 0, 1, 5, 1),
        (-3, 1, 1, 4, 0),
        (12, 0, 1, 7, 1),
        (-8, 4, 6, 1, 1),
        (73, 1, 6, 23, 1),
    ];

    fn forms_for(case: &(i64, i64, i64, i64, i64)) -> (TwistParams, i64, Vec<QuadForm>) {
        let &(delta, r, n, d, h) = case;
        let tw = TwistParams::new(delta, r, n).unwrap();
        let set = enumerate_classes(d * delta.abs(), r * h, n, SignMode::Both).unwrap();
        (tw, n, set.reps.iter().map(|c| c.form()).collect())
    }

    #[test]
    fn untwisted_is_one() {
        let tw = TwistParams::untwisted();
        assert_eq!(genus_char(&QuadForm::new(6, 1, 1), &tw, 6).unwrap(), 1);
        assert_eq!(genus_char_gkz(&QuadForm::new(2, 2, 2), &tw, 1), 1);
    }

    #[test]
    fn degenerate_gcd_gives_zero() {
        // disc(-15·[..]) with common factor 5 shared by a/N, b, c and Δ = 5
        let tw = TwistParams::new(5, 1, 1).unwrap();
        assert_eq!(genus_char(&QuadForm::new(5, 5, 5), &tw, 1).unwrap(), 0);
    }

    #[test]
    fn example_form() {
        let tw = TwistParams::new(-23, 1, 6).unwrap();
        let q = QuadForm::new(6, 1, 1);
        assert_eq!(genus_char(&q, &tw, 6).unwrap(), 1);
        assert_eq!(genus_char_gkz(&q, &tw, 6), 1);
        assert_eq!(genus_char(&q.neg(), &tw, 6).unwrap(), -1);
    }

    #[test]
    fn twist_params_validation() {
        assert!(TwistParams::new(-23, 1, 6).is_ok());
        assert!(TwistParams::new(-23, 2, 6).is_err());
        assert!(TwistParams::new(-12, 2, 1).is_err());
    }

    #[test]
    fn character_is_well_defined_on_represented_values() {
        for case in CASES {
            let (tw, n, forms) = forms_for(case);
            for q in forms {
                if genus_char(&q, &tw, n).unwrap() == 0 {
                    continue;
                }
                let mut values = represented_coprime_values(&q, tw.delta, 12)
                    .map(|v| kronecker(tw.delta, v))
                    .collect::<Vec<_>>();
                values.dedup();
                assert_eq!(values.len(), 1, "{q} Δ={}", tw.delta);
            }
        }
    }

    #[test]
    fn negation_flips_by_sign_of_delta() {
        for case in CASES {
            let (tw, n, forms) = forms_for(case);
            for q in forms {
                let lhs = genus_char(&q.neg(), &tw, n).unwrap();
                let rhs = tw.sign() as i32 * genus_char(&q, &tw, n).unwrap();
                assert_eq!(lhs, rhs, "{q}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn direct_matches_gkz_and_is_gamma0_invariant(case in 0usize..CASES.len(), pick in 0usize..64,
                                                      c0 in -4i64..=4, d in -11i64..=11, t in -5i64..=5) {
            let (tw, n, forms) = forms_for(&CASES[case]);
            let q = forms[pick % forms.len()];
            let Some(gamma) = gamma0_matrix(n, c0, d, t) else { return Ok(()); };
            let q2 = q.act(&gamma);
            let direct = genus_char(&q2, &tw, n).unwrap();
            prop_assert_eq!(direct, genus_char_gkz(&q2, &tw, n));
            prop_assert_eq!(direct, genus_char(&q, &tw, n).unwrap());
        }
    }
}
