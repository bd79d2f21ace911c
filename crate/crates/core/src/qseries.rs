//! Exact integer q-series: eta powers, Ramanujan's mock theta `f(q)`, `E₄`,
//! and the weight-0 Γ₀(6) function `F`.
//!
//! A series stores integer coefficients `c_0..=c_T` together with a shift in
//! 24ths, so coefficient `n` belongs to `q^{n + shift24/24}`. For
//! `η^{-25} = q^{-25/24} ∏(1-q^n)^{-25}` the coefficient of index
//! `(24n-1)/24` is therefore entry `n + 1`.

use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::arith::sigma_table;
use crate::numkernel::HPComplex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSeries {
    coeffs: Vec<Integer>,
    shift24: i64,
}

impl IntSeries {
    /// Truncated series with coefficients `0..=order` (missing entries are zero).
    pub fn new(mut coeffs: Vec<Integer>, order: usize, shift24: i64) -> Self {
        coeffs.resize(order + 1, Integer::new());
        Self { coeffs, shift24 }
    }

    pub fn one(order: usize) -> Self {
        let mut c = vec![Integer::new(); order + 1];
        c[0] = Integer::from(1);
        Self::new(c, order, 0)
    }

    pub fn from_i64(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect(), order, 0)
    }

    /// Truncation order `T`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn shift24(&self) -> i64 {
        self.shift24
    }

    pub fn with_shift24(mut self, shift24: i64) -> Self {
        self.shift24 = shift24;
        self
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Integer {
        &self.coeffs[n]
    }

    /// Coefficient of `q^{e24/24}`, or `None` outside the stored range.
    pub fn coeff_at_exponent24(&self, e24: i64) -> Option<&Integer> {
        let rel = e24 - self.shift24;
        if rel % 24 != 0 || rel < 0 {
            return None;
        }
        self.coeffs.get((rel / 24) as usize)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self::new(self.coeffs[..=order].to_vec(), order, self.shift24)
    }

    pub fn scale(&self, k: &Integer) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| Integer::from(c * k)).collect(),
            shift24: self.shift24,
        }
    }

    /// `f(q^k)`; the order grows to `k·T` with zeros interleaved.
    pub fn dilate(&self, k: usize) -> Self {
        let order = self.order() * k;
        let mut c = vec![Integer::new(); order + 1];
        for (n, v) in self.coeffs.iter().enumerate() {
            c[n * k] = v.clone();
        }
        Self::new(c, order, self.shift24 * k as i64)
    }

    /// Multiplicative inverse of a series whose constant term is `±1`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.clone().abs() != 1 {
            return Err(Error::InvalidInput(format!(
                "series with constant term {c0} is not a unit"
            )));
        }
        let t = self.order();
        let mut inv = vec![Integer::new(); t + 1];
        inv[0] = c0.clone();
        for n in 1..=t {
            let mut acc = Integer::new();
            for j in 1..=n {
                acc += Integer::from(&self.coeffs[j] * &inv[n - j]);
            }
            // c0 = ±1, so dividing by it is multiplying by it.
            inv[n] = -(acc * c0);
        }
        Ok(Self::new(inv, t, -self.shift24))
    }

    /// Evaluates `Σ c_n q^{n + shift24/24}` with `q = e^{2πiz}`.
    pub fn evaluate(&self, z: &HPComplex) -> HPComplex {
        let p = z.prec();
        let two_pi_i_z = z.mul_i().scale(&(crate::numkernel::pi(p) * 2u32));
        let q = two_pi_i_z.exp();
        let mut acc = HPComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = &acc * &q;
            acc.re += c;
        }
        let lead = two_pi_i_z.scale(&(rug::Float::with_val(p, self.shift24) / 24u32)).exp();
        &acc * &lead
    }
}

impl Mul for &IntSeries {
    type Output = IntSeries;
    fn mul(self, rhs: &IntSeries) -> IntSeries {
        let t = self.order().min(rhs.order());
        let mut c = vec![Integer::new(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(t + 1 - i) {
                c[i + j] += Integer::from(a * b);
            }
        }
        IntSeries::new(c, t, self.shift24 + rhs.shift24)
    }
}

fn combine(a: &IntSeries, b: &IntSeries, f: impl Fn(&Integer, &Integer) -> Integer) -> IntSeries {
    assert_eq!(a.shift24, b.shift24, "adding series with different q-shifts");
    let t = a.order().min(b.order());
    let c = (0..=t).map(|n| f(&a.coeffs[n], &b.coeffs[n])).collect();
    IntSeries::new(c, t, a.shift24)
}

impl Add for &IntSeries {
    type Output = IntSeries;
    fn add(self, rhs: &IntSeries) -> IntSeries {
        combine(self, rhs, |x, y| Integer::from(x + y))
    }
}

impl Sub for &IntSeries {
    type Output = IntSeries;
    fn sub(self, rhs: &IntSeries) -> IntSeries {
        combine(self, rhs, |x, y| Integer::from(x - y))
    }
}

impl Neg for &IntSeries {
    type Output = IntSeries;
    fn neg(self) -> IntSeries {
        self.scale(&Integer::from(-1))
    }
}

/// Coefficients of `∏_{n≥1} (1-q^n)^e` up to `q^T`, tagged with the `q^{e/24}` shift.
///
/// Uses `n·c(n) = -e Σ_{j=1}^{n} σ₁(j) c(n-j)`; every division by `n` is exact.
pub fn eta_power_coeffs(e: i64, t: usize) -> Result<IntSeries> {
    assert!(t >= 1, "truncation order must be positive");
    let sig = sigma_table(1, t);
    let mut c = vec![Integer::new(); t + 1];
    c[0] = Integer::from(1);
    for n in 1..=t {
        let mut acc = Integer::new();
        for j in 1..=n {
            acc += Integer::from(&c[n - j] * sig[j]);
        }
        acc *= -e;
        let (q, r) = acc.div_rem(Integer::from(n));
        if r != 0 {
            return Err(Error::InexactDivision { index: n });
        }
        c[n] = q;
    }
    Ok(IntSeries::new(c, t, e))
}

/// Coefficients `a_f(0..=T)` of `f(q) = 1 + Σ q^{n²} / ((1+q)²⋯(1+q^n)²)`.
pub fn mock_theta_coeffs(t: usize) -> IntSeries {
    assert!(t >= 1, "truncation order must be positive");
    let mut total = IntSeries::one(t);
    // running = ∏_{j≤n} (1+q^j)^{-2}
    let mut running = IntSeries::one(t);
    let mut n = 1usize;
    while n * n <= t {
        let mut inv = vec![Integer::new(); t + 1];
        // (1+q^n)^{-2} = Σ_k (-1)^k (k+1) q^{nk}
        for k in 0..=t / n {
            let v = (k as i64 + 1) * if k % 2 == 0 { 1 } else { -1 };
            inv[n * k] = Integer::from(v);
        }
        running = &running * &IntSeries::new(inv, t, 0);
        let mut shifted = vec![Integer::new(); t + 1];
        for i in 0..=t - n * n {
            shifted[i + n * n] = running.coeffs[i].clone();
        }
        total = &total + &IntSeries::new(shifted, t, 0);
        n += 1;
    }
    total
}

/// `E₄ = 1 + 240 Σ σ₃(n) qⁿ` up to `q^T`.
pub fn e4_coeffs(t: usize) -> IntSeries {
    assert!(t >= 1, "truncation order must be positive");
    let sig = sigma_table(3, t);
    let mut c: Vec<Integer> = sig.iter().map(|&s| Integer::from(s) * 240u32).collect();
    c[0] = Integer::from(1);
    IntSeries::new(c, t, 0)
}

/// q-expansion of
/// `F = -(1/40)(E₄(z)+4E₄(2z)-9E₄(3z)-36E₄(6z)) / (η(z)η(2z)η(3z)η(6z))²`.
///
/// Entry `n` is the coefficient of `q^{n-1}` for `n = 0..=T`.
pub fn gamma0_6_f_coeffs(t: usize) -> Result<IntSeries> {
    assert!(t >= 1, "truncation order must be positive");
    let e4 = e4_coeffs(t);
    let mut num = e4.clone();
    for (k, w) in [(2usize, 4i64), (3, -9), (6, -36)] {
        num = &num + &e4.dilate(k).truncate(t).scale(&Integer::from(w));
    }
    let num: Vec<Integer> = num
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let r = Rational::from((c.clone(), Integer::from(-40)));
            if *r.denom() != 1 {
                return Err(Error::NonIntegralCoefficient {
                    exponent: n as i64 - 1,
                    value: r.to_string(),
                });
            }
            Ok(r.numer().clone())
        })
        .collect::<Result<_>>()?;
    let num = IntSeries::new(num, t, 0);
    // η(z)²η(2z)²η(3z)²η(6z)² = q · ∏ (…); the q-power cancels into the q^{-1} shift.
    let mut den = IntSeries::one(t);
    for k in [1usize, 2, 3, 6] {
        den = &den * &eta_power_coeffs(2, t)?.with_shift24(0).dilate(k).truncate(t);
    }
    let f = &num * &den.inverse()?;
    Ok(f.with_shift24(-24))
}
