//! Definite integral binary quadratic forms with Γ₀(N) level structure.
//!
//! Forms in a level-`N` set satisfy `N | a` and `b ≡ ρ (mod 2N)`. The action of
//! a matrix `g = (p q; r s)` is `(Q∘g)(x, y) = Q(px + qy, rx + sy)`, which keeps
//! both congruences when `g ∈ Γ₀(N)`.

mod classes;
mod genus;

use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{HPComplex, PrecCtx};

pub use classes::{enumerate_classes, enumerate_classes_with_bound, ClassRep, ClassSet, SignMode};
pub use genus::{genus_char, genus_char_gkz, genus_char_with_bound, TwistParams};

/// Integer 2×2 matrix `(a b; c d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);
    pub const S: Mat2 = Mat2::new(0, -1, 1, 0);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn translation(t: i64) -> Self {
        Self::new(1, t, 0, 1)
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Mat2 {
        debug_assert_eq!(self.det(), 1);
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn in_gamma0(&self, n: i64) -> bool {
        self.det() == 1 && self.c % n == 0
    }

    /// Möbius action `(az + b)/(cz + d)`.
    pub fn act(&self, z: &HPComplex) -> HPComplex {
        let num = &z.scale_i64(self.a) + &HPComplex::from_i64(z.prec(), self.b, 0);
        &num / &self.cocycle(z)
    }

    /// Automorphy factor `cz + d`.
    pub fn cocycle(&self, z: &HPComplex) -> HPComplex {
        &z.scale_i64(self.c) + &HPComplex::from_i64(z.prec(), self.d, 0)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Integral binary quadratic form `[a, b, c] = ax² + bxy + cy²`, stored as given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_definite(&self) -> bool {
        self.disc() < 0 && self.a != 0
    }

    pub fn is_positive_definite(&self) -> bool {
        self.is_definite() && self.a > 0
    }

    pub fn neg(&self) -> QuadForm {
        QuadForm::new(-self.a, -self.b, -self.c)
    }

    pub fn value(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// `Q∘g`.
    pub fn act(&self, g: &Mat2) -> QuadForm {
        let (p, q, r, s) = (g.a, g.b, g.c, g.d);
        QuadForm::new(
            self.value(p, r),
            2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            self.value(q, s),
        )
    }

    /// SL₂(ℤ) automorphs `((t-bu)/2, -cu; au, (t+bu)/2)` from solutions of `t² + Du² = 4`.
    pub fn automorphs(&self) -> Vec<Mat2> {
        let dd = -self.disc();
        let mut out = Vec::new();
        for u in -2i64..=2 {
            for t in -2i64..=2 {
                if t * t + dd * u * u == 4 {
                    out.push(Mat2::new(
                        (t - self.b * u) / 2,
                        -self.c * u,
                        self.a * u,
                        (t + self.b * u) / 2,
                    ));
                }
            }
        }
        out
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// Upper-half-plane root of `aτ² + bτ + c`, at working precision.
pub fn heegner_point(q: &QuadForm, ctx: &PrecCtx) -> HPComplex {
    assert!(q.is_definite(), "Heegner point of an indefinite form {q}");
    let w = ctx.working();
    let two_a = Float::with_val(w, 2 * q.a);
    let re = Float::with_val(w, -q.b) / &two_a;
    let im = Float::with_val(w, -q.disc()).sqrt() / two_a.abs();
    HPComplex::new(re, im)
}

/// Result of Gauss reduction. When `negated` is set the input was negative
/// definite and `(-Q)∘g = form`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub form: QuadForm,
    pub g: Mat2,
    pub negated: bool,
}

/// Gauss reduction: returns the reduced form (`|b| ≤ a ≤ c`, `b ≥ 0` if
/// `|b| = a` or `a = c`) together with `g` such that `Q∘g` is that form.
pub fn sl2_reduce(q: &QuadForm) -> Reduction {
    assert!(q.is_definite(), "reduction of an indefinite form {q}");
    let negated = q.a < 0;
    let mut f = if negated { q.neg() } else { *q };
    let mut g = Mat2::IDENTITY;
    loop {
        if !(-f.a < f.b && f.b <= f.a) {
            // translate so that b lands in (-a, a]
            let t = (f.a - f.b).div_euclid(2 * f.a);
            let tm = Mat2::translation(t);
            f = f.act(&tm);
            g = g.mul(&tm);
            continue;
        }
        if f.a > f.c || (f.a == f.c && f.b < 0) {
            f = f.act(&Mat2::S);
            g = g.mul(&Mat2::S);
            continue;
        }
        return Reduction { form: f, g, negated };
    }
}

/// Number of SL₂(ℤ) automorphs of a definite form (2, 4 or 6).
pub fn automorph_order(q: &QuadForm) -> usize {
    q.automorphs().len()
}

/// Order of the stabilizer of `q` in the image of Γ₀(N) in PSL₂(ℤ).
pub fn stabilizer_order(q: &QuadForm, n: i64) -> usize {
    q.automorphs().iter().filter(|g| g.c % n == 0).count() / 2
}

/// Some `γ ∈ Γ₀(N)` with `Q1∘γ = Q2`, if one exists.
pub fn gamma0_equivalent(q1: &QuadForm, q2: &QuadForm, n: i64) -> Result<Option<Mat2>> {
    if q1.disc() != q2.disc() {
        return Err(Error::DiscMismatch(q1.disc(), q2.disc()));
    }
    if (q1.a > 0) != (q2.a > 0) {
        return Ok(None);
    }
    let r1 = sl2_reduce(q1);
    let r2 = sl2_reduce(q2);
    if r1.form != r2.form {
        return Ok(None);
    }
    let g2_inv = r2.g.inv();
    Ok(r1
        .form
        .automorphs()
        .iter()
        .map(|al| r1.g.mul(al).mul(&g2_inv))
        .find(|gamma| gamma.c % n == 0))
}
