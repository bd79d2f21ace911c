use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::prec::{from_decimal, to_decimal};

/// Arbitrary-precision complex number. Both parts always share one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct HPComplex {
    pub re: Float,
    pub im: Float,
}

/// Lossless decimal form of an [`HPComplex`], used by caches and reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecimalComplex {
    pub re: String,
    pub im: String,
}

impl HPComplex {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_real(Float::with_val(prec, 1))
    }

    pub fn i(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::with_val(prec, 1),
        }
    }

    pub fn from_i64(prec: u32, re: i64, im: i64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Copy rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self {
            re: Float::with_val(self.prec(), -&self.im),
            im: self.re.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -(Float::with_val(p, &self.im / &n))),
        }
    }

    /// `e^{iθ}`.
    pub fn expi(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        Self { re: c, im: s }
    }

    pub fn exp(&self) -> Self {
        let m = self.re.clone().exp();
        Self::expi(&self.im).scale(&m)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Self {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        // sqrt((r + |x|)/2) on the larger component avoids cancellation.
        let t = Float::with_val(p, &r + self.re.clone().abs()) / 2u32;
        let t = t.sqrt();
        if self.re >= 0 {
            let im = Float::with_val(p, &self.im / &t) / 2u32;
            Self { re: t, im }
        } else {
            let re = Float::with_val(p, self.im.clone().abs() / &t) / 2u32;
            let im = if self.im < 0 { -t } else { t };
            Self { re, im }
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Principal power `z^a` for real `a`.
    pub fn pow_real(&self, a: &Float) -> Self {
        if self.is_zero() {
            return Self::zero(self.prec());
        }
        let l = self.ln();
        l.scale(a).exp()
    }

    /// Largest of `|re|`, `|im|`, as a cheap magnitude.
    pub fn max_abs_part(&self) -> Float {
        let a = self.re.clone().abs();
        let b = self.im.clone().abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn to_decimal(&self, prec: u32) -> DecimalComplex {
        DecimalComplex {
            re: to_decimal(&self.re, prec),
            im: to_decimal(&self.im, prec),
        }
    }

    pub fn from_decimal(d: &DecimalComplex, prec: u32) -> Option<Self> {
        Some(Self {
            re: from_decimal(&d.re, prec)?,
            im: from_decimal(&d.im, prec)?,
        })
    }
}

/// `π` at the given precision.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

impl fmt::Display for HPComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = Some(f.precision().unwrap_or(20));
        let im = &self.im;
        let sign = if im.is_sign_negative() { "-" } else { "+" };
        write!(
            f,
            "{} {} {}i",
            self.re.to_string_radix(10, digits),
            sign,
            im.clone().abs().to_string_radix(10, digits)
        )
    }
}

impl Add<&HPComplex> for &HPComplex {
    type Output = HPComplex;
    fn add(self, rhs: &HPComplex) -> HPComplex {
        let p = self.prec().max(rhs.prec());
        HPComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl Sub<&HPComplex> for &HPComplex {
    type Output = HPComplex;
    fn sub(self, rhs: &HPComplex) -> HPComplex {
        let p = self.prec().max(rhs.prec());
        HPComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl Mul<&HPComplex> for &HPComplex {
    type Output = HPComplex;
    fn mul(self, rhs: &HPComplex) -> HPComplex {
        let p = self.prec().max(rhs.prec());
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        HPComplex {
            re: ac - bd,
            im: ad + bc,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div<&HPComplex> for &HPComplex {
    type Output = HPComplex;
    fn div(self, rhs: &HPComplex) -> HPComplex {
        self * &rhs.recip()
    }
}

impl Neg for &HPComplex {
    type Output = HPComplex;
    fn neg(self) -> HPComplex {
        HPComplex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<HPComplex> for HPComplex {
            type Output = HPComplex;
            fn $m(self, rhs: HPComplex) -> HPComplex {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&HPComplex> for HPComplex {
            type Output = HPComplex;
            fn $m(self, rhs: &HPComplex) -> HPComplex {
                (&self).$m(rhs)
            }
        }
        impl $tr<HPComplex> for &HPComplex {
            type Output = HPComplex;
            fn $m(self, rhs: HPComplex) -> HPComplex {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for HPComplex {
    type Output = HPComplex;
    fn neg(self) -> HPComplex {
        -&self
    }
}

impl AddAssign<&HPComplex> for HPComplex {
    fn add_assign(&mut self, rhs: &HPComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&HPComplex> for HPComplex {
    fn sub_assign(&mut self, rhs: &HPComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
