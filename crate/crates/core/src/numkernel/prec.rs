use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

/// Default number of extra working bits carried on top of the requested precision.
pub const DEFAULT_GUARD_BITS: u32 = 64;

/// Requested precision plus the guard bits used for intermediate work.
///
/// Every public numeric result is rounded back to `prec_bits` before it is
/// reported; everything in between runs at [`PrecCtx::working`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecCtx {
    pub prec_bits: u32,
    pub guard_bits: u32,
}

impl PrecCtx {
    /// Panics if `prec_bits < 53`.
    pub fn new(prec_bits: u32) -> Self {
        Self::with_guard(prec_bits, DEFAULT_GUARD_BITS)
    }

    pub fn with_guard(prec_bits: u32, guard_bits: u32) -> Self {
        assert!(prec_bits >= 53, "prec_bits must be at least 53, got {prec_bits}");
        Self { prec_bits, guard_bits }
    }

    /// Working precision: `prec_bits + guard_bits`.
    pub fn working(&self) -> u32 {
        self.prec_bits + self.guard_bits
    }

    /// Same context with the working precision doubled (used by retry ladders).
    pub fn escalated(&self) -> Self {
        Self {
            prec_bits: self.prec_bits,
            guard_bits: self.guard_bits + self.working(),
        }
    }

    /// A context whose *requested* precision equals this context's working precision.
    pub fn as_requested_working(&self) -> Self {
        Self::with_guard(self.working(), self.guard_bits)
    }

    /// A float at working precision.
    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.working(), v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.working(), Constant::Pi)
    }

    /// `2^{-bits}` at working precision.
    pub fn two_pow_neg(&self, bits: i32) -> Float {
        Float::with_val(self.working(), 1) >> bits
    }

    /// The relative tolerance `2^{-prec_bits + slack}`.
    pub fn rel_eps(&self, slack: i32) -> Float {
        self.two_pow_neg(self.prec_bits as i32 - slack)
    }
}

impl Default for PrecCtx {
    fn default() -> Self {
        Self::new(128)
    }
}

/// Rounds `x` to `prec` bits.
pub fn round_to(x: &Float, prec: u32) -> Float {
    Float::with_val(prec, x)
}

/// Number of decimal digits needed to round-trip a `prec`-bit binary float.
pub fn decimal_digits(prec: u32) -> usize {
    // ceil(prec * log10(2)) + 1
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// Decimal serialization of `x` rounded to `prec` bits.
pub fn to_decimal(x: &Float, prec: u32) -> String {
    let r = round_to(x, prec);
    if r.is_zero() {
        return "0".to_string();
    }
    r.to_string_radix(10, Some(decimal_digits(prec)))
}

/// Parses a decimal string produced by [`to_decimal`].
pub fn from_decimal(s: &str, prec: u32) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(prec, p))
}

/// `log2 |x|` as an `f64`, or `-inf` for zero.
pub fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + e as f64
}
