//! Evaluation of η, E₄, j and the Γ₀(6) function `F` at points of the upper
//! half-plane, plus Atkin-Lehner matrices.
//!
//! Every evaluator reduces its argument into the standard fundamental domain
//! first, so the q-series run with `|q| ≤ e^{-π√3}`. Results carry the working
//! precision of the supplied context.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::arith::{egcd, gcd, sigma_table};
use crate::numkernel::{pi, HPComplex, PrecCtx};
use crate::quadforms::Mat2;

const MAX_REDUCTION_STEPS: usize = 100_000;

/// One generator step of a fundamental-domain reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// `z ↦ z + t`
    T(i64),
    /// `z ↦ -1/z`
    S,
}

#[derive(Clone, Debug)]
pub struct Reduced {
    /// Reduced point `γz`.
    pub z: HPComplex,
    /// `γ ∈ SL₂(ℤ)` with `z' = γz`.
    pub gamma: Mat2,
    /// Generator moves in the order they were applied.
    pub moves: Vec<Move>,
}

/// Moves `z` into `|Re z| ≤ 1/2`, `|z| ≥ 1` (up to `2^{-prec}` at the boundary).
pub fn reduce_fundamental(z: &HPComplex, ctx: &PrecCtx) -> Reduced {
    let w = ctx.working();
    assert!(z.im > 0, "reduce_fundamental: Im z must be positive");
    let mut z = z.with_prec(w);
    let mut gamma = Mat2::IDENTITY;
    let mut moves = Vec::new();
    let one_minus = Float::with_val(w, 1) - ctx.two_pow_neg(ctx.prec_bits as i32);
    for _ in 0..MAX_REDUCTION_STEPS {
        let t = -Float::with_val(w, z.re.round_ref()).to_f64() as i64;
        if t != 0 {
            z.re += t;
            gamma = Mat2::translation(t).mul(&gamma);
            moves.push(Move::T(t));
        }
        if z.norm_sqr() < one_minus {
            z = -&z.recip();
            gamma = Mat2::S.mul(&gamma);
            moves.push(Move::S);
        } else {
            return Reduced { z, gamma, moves };
        }
    }
    panic!("reduce_fundamental: no convergence after {MAX_REDUCTION_STEPS} steps");
}

/// `e^{2πi z}` at the precision of `z`.
pub fn q_of(z: &HPComplex) -> HPComplex {
    let two_pi = pi(z.prec()) * 2u32;
    z.mul_i().scale(&two_pi).exp()
}

/// Dedekind η, with the multiplier tracked through each reduction move.
pub fn eta(z: &HPComplex, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    let red = reduce_fundamental(z, ctx);
    // η(z_orig) = factor · η(z_reduced), replayed move by move.
    let mut factor = HPComplex::one(w);
    let mut cur = z.with_prec(w);
    for mv in &red.moves {
        match *mv {
            Move::T(t) => {
                // η(z + t) = e^{iπt/12} η(z)
                let theta = Float::with_val(w, -t) * pi(w) / 12u32;
                factor = &factor * &HPComplex::expi(&theta);
                cur.re += t;
            }
            Move::S => {
                // η(-1/z) = √(-iz) η(z)
                let root = (-&cur.mul_i()).sqrt();
                factor = &factor / &root;
                cur = -&cur.recip();
            }
        }
    }
    &factor * &eta_series(&red.z, ctx)
}

/// `q^{1/24} Σ_k (-1)^k q^{k(3k-1)/2}` summed directly; no reduction.
pub fn eta_series(z: &HPComplex, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    let z = z.with_prec(w);
    let q = q_of(&z);
    let log2_q = (z.im.to_f64() * 2.0 * std::f64::consts::PI) / std::f64::consts::LN_2;
    let mut sum = HPComplex::one(w);
    let mut k: i64 = 1;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if (e1 as f64) * log2_q > w as f64 + 8.0 {
            break;
        }
        let e2 = k * (3 * k + 1) / 2;
        let pair = &q.powi(e1) + &q.powi(e2);
        if k % 2 == 0 {
            sum += &pair;
        } else {
            sum -= &pair;
        }
        k += 1;
    }
    let q24 = z.mul_i().scale(&(pi(w) * 2u32 / 24u32)).exp();
    &q24 * &sum
}

/// `E₄` via reduction and the weight-4 automorphy factor.
pub fn eisenstein_e4(z: &HPComplex, ctx: &PrecCtx) -> HPComplex {
    let red = reduce_fundamental(z, ctx);
    let val = e4_series(&red.z, ctx);
    // E₄(γz) = (cz+d)⁴ E₄(z)
    let j = red.gamma.cocycle(&z.with_prec(ctx.working()));
    &val / &j.powi(4)
}

/// `1 + 240 Σ σ₃(n) qⁿ` summed directly; no reduction.
pub fn e4_series(z: &HPComplex, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    let z = z.with_prec(w);
    let q = q_of(&z);
    let log2_q = (z.im.to_f64() * 2.0 * std::f64::consts::PI) / std::f64::consts::LN_2;
    let terms = ((w as f64 + 16.0) / log2_q).ceil() as usize + 1;
    let sig = sigma_table(3, terms);
    let mut acc = HPComplex::zero(w);
    for n in (1..=terms).rev() {
        acc.re += sig[n];
        acc = &acc * &q;
    }
    let mut out = acc.scale_i64(240);
    out.re += 1;
    out
}

/// `j = E₄³/η²⁴`.
pub fn j_invariant(z: &HPComplex, ctx: &PrecCtx) -> HPComplex {
    let red = reduce_fundamental(z, ctx);
    let e4 = e4_series(&red.z, ctx);
    let eta = eta_series(&red.z, ctx);
    &e4.powi(3) / &eta.powi(24)
}

/// `J = j - 744`.
pub fn j_minus_744(z: &HPComplex, ctx: &PrecCtx) -> HPComplex {
    let mut j = j_invariant(z, ctx);
    j.re -= 744;
    j
}

/// `F = -(1/40)(E₄(z)+4E₄(2z)-9E₄(3z)-36E₄(6z)) / (η(z)η(2z)η(3z)η(6z))²`.
pub fn gamma0_6_f(z: &HPComplex, ctx: &PrecCtx) -> HPComplex {
    let w = ctx.working();
    let z = z.with_prec(w);
    let mut num = HPComplex::zero(w);
    let mut den = HPComplex::one(w);
    for (k, coeff) in [(1i64, 1i64), (2, 4), (3, -9), (6, -36)] {
        let zk = z.scale_i64(k);
        num += &eisenstein_e4(&zk, ctx).scale_i64(coeff);
        den = &den * &eta(&zk, ctx);
    }
    let v = &num / &den.powi(2);
    v.scale(&(Float::with_val(w, -1) / 40u32))
}

/// Atkin-Lehner matrix `W_Q^N = (Qa, b; Nc, Qd)/√Q` with `Qad - (N/Q)bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ALMatrix {
    pub n: i64,
    pub q: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl ALMatrix {
    /// Integer matrix `(Qa, b; Nc, Qd)` of determinant `Q`.
    pub fn integer_matrix(&self) -> Mat2 {
        Mat2::new(self.q * self.a, self.b, self.n * self.c, self.q * self.d)
    }

    pub fn is_valid(&self) -> bool {
        self.q * self.a * self.d - (self.n / self.q) * self.b * self.c == 1
    }

    /// Möbius action (the `1/√Q` scaling cancels).
    pub fn act(&self, z: &HPComplex) -> HPComplex {
        self.integer_matrix().act(z)
    }

    /// Normalized automorphy factor `(Nc z + Qd)/√Q`.
    pub fn cocycle(&self, z: &HPComplex) -> HPComplex {
        let j = self.integer_matrix().cocycle(z);
        let s = Float::with_val(z.prec(), self.q).sqrt();
        j.scale(&s.recip())
    }
}

/// Atkin-Lehner matrix for an exact divisor `Q` of `N`, minimal in `|b|`, then
/// `|c|`, preferring `c > 0`, then `b > 0`.
pub fn atkin_lehner_matrix(n: i64, q: i64) -> Result<ALMatrix> {
    if n <= 0 || q <= 0 || n % q != 0 || gcd(q, n / q) != 1 {
        return Err(Error::InvalidInput(format!("{q} is not an exact divisor of {n}")));
    }
    let m = n / q;
    for bound in 0i64.. {
        for abs_c in 0..=bound {
            for &c in &[abs_c, -abs_c] {
                for &b in &[bound, -bound] {
                    let rhs = 1 + m * b * c;
                    if rhs % q != 0 {
                        continue;
                    }
                    let k = rhs / q;
                    let (a, d) = if k == 0 { (0, 0) } else { (1, k) };
                    let al = ALMatrix { n, q, a, b, c, d };
                    debug_assert!(al.is_valid());
                    return Ok(al);
                }
            }
        }
        if bound > n * n + 2 {
            break;
        }
    }
    Err(Error::NoSolution(format!("W_{q}^{n}")))
}

/// Another valid choice `W·γ` for `W_Q^N`, with `γ ∈ Γ₀(N)`.
pub fn atkin_lehner_variant(al: &ALMatrix, gamma: &Mat2) -> ALMatrix {
    assert!(gamma.in_gamma0(al.n), "{gamma} is not in Γ₀({})", al.n);
    let m = al.n / al.q;
    let (p, q, r, s) = (gamma.a, gamma.b, gamma.c / al.n, gamma.d);
    // (Qa, b; Nc, Qd)(p, q; Nr, s)
    ALMatrix {
        a: al.a * p + m * al.b * r,
        b: al.q * al.a * q + al.b * s,
        c: al.c * p + al.q * al.d * r,
        d: m * al.c * q + al.d * s,
        ..*al
    }
}

/// Moves `z` up within its Γ₀(N)-orbit: returns `(γz, γ)` with `γ ∈ Γ₀(N)`,
/// `|Re γz| ≤ 1/2` and `|c·γz + d| ≥ 1` for every bottom row `(c, d)` with `N | c`.
pub fn reduce_gamma0(z: &HPComplex, n: i64, ctx: &PrecCtx) -> (HPComplex, Mat2) {
    let w = ctx.working();
    let mut z = z.with_prec(w);
    let mut gamma = Mat2::IDENTITY;
    let one_minus = Float::with_val(w, 1) - ctx.two_pow_neg(ctx.prec_bits as i32);
    for _ in 0..MAX_REDUCTION_STEPS {
        let t = -Float::with_val(w, z.re.round_ref()).to_f64() as i64;
        if t != 0 {
            z.re += t;
            gamma = Mat2::translation(t).mul(&gamma);
        }
        let y = z.im.to_f64();
        let x = z.re.to_f64();
        let mut best: Option<(Float, Mat2)> = None;
        let mut c = n;
        while (c as f64) * y < 1.0 {
            let center = -(c as f64) * x;
            for d in [center.floor() as i64, center.ceil() as i64] {
                let (g, u, v) = egcd(d, c);
                if g != 1 {
                    continue;
                }
                // u·d + v·c = 1, so (u, -v; c, d) has determinant 1
                let row = Mat2::new(u, -v, c, d);
                let size = row.cocycle(&z).norm_sqr();
                if best.as_ref().is_none_or(|(b, _)| size < *b) {
                    best = Some((size, row));
                }
            }
            c += n;
        }
        match best {
            Some((size, row)) if size < one_minus => {
                z = row.act(&z);
                gamma = row.mul(&gamma);
            }
            _ => return (z, gamma),
        }
    }
    panic!("reduce_gamma0: no convergence after {MAX_REDUCTION_STEPS} steps");
}
