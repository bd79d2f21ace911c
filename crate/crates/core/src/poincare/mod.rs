//! Maass-Poincaré series `F_m(z, s, k)` on Γ₀(N) by direct coset summation.
//!
//! `F_m(z,s,k) = 1/(2Γ(2s)) Σ_{γ ∈ Γ∞\Γ₀(N)} [𝓜_{s,k}(4πmy) e(-mx)]|_k γ`.
//! For even `k` the rows `±(c, d)` give equal terms, so the sum runs over
//! `(0, 1)` and rows with `c > 0` and the prefactor becomes `1/Γ(2s)`.

mod lift;

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modeval::{atkin_lehner_matrix, gamma0_6_f, j_minus_744, reduce_gamma0};
use crate::numkernel::arith::{egcd, gcd};
use crate::numkernel::gamma::gamma_half;
use crate::numkernel::sum::CompensatedComplexSum;
use crate::numkernel::{kummer_m, pi, DecimalComplex, HPComplex, PrecCtx};
use crate::quadforms::Mat2;

pub use lift::{
    al_multiplier, even_coefficient_factor, lift_constant_even, lift_constant_odd, lift_constant_odd_log,
    lift_constants, lift_principal_part, odd_coefficient_factor, OddConstant, Parity, PrincipalTerm,
};

/// One scalar Poincaré series, optionally composed with an Atkin-Lehner involution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareSpec {
    pub m: u64,
    pub s: f64,
    /// Weight (even).
    pub k: i64,
    pub n: i64,
    /// Exact divisor `Q` of `N`; evaluates `F|_k W_Q^N`.
    pub al_word: Option<i64>,
    /// Hard cap on `c` (rows with larger `c` are dropped).
    pub c_max: Option<i64>,
    /// Target size of the truncation tail relative to the leading term.
    /// Defaults to `2^{-prec_bits/2}`.
    pub term_floor: Option<f64>,
}

impl PoincareSpec {
    pub fn new(m: u64, s: f64, k: i64, n: i64) -> Self {
        Self {
            m,
            s,
            k,
            n,
            al_word: None,
            c_max: None,
            term_floor: None,
        }
    }

    pub fn with_al(mut self, q: i64) -> Self {
        self.al_word = (q != 1).then_some(q);
        self
    }

    pub fn with_c_max(mut self, c_max: i64) -> Self {
        self.c_max = Some(c_max);
        self
    }

    pub fn with_term_floor(mut self, floor: f64) -> Self {
        self.term_floor = Some(floor);
        self
    }

    /// Shape checks only; convergence is checked at evaluation.
    fn validate_shape(&self) -> Result<()> {
        if self.k % 2 != 0 {
            return Err(Error::InvalidInput(format!("weight {} is not even", self.k)));
        }
        if self.m == 0 || self.n <= 0 {
            return Err(Error::InvalidInput("need m > 0 and N > 0".into()));
        }
        if let Some(q) = self.al_word {
            if q <= 0 || self.n % q != 0 || gcd(q, self.n / q) != 1 {
                return Err(Error::InvalidInput(format!(
                    "{q} is not an exact divisor of {}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        if self.s <= 1.0 {
            return Err(Error::NonConvergent(format!(
                "Poincaré series needs Re(s) > 1, got s = {}",
                self.s
            )));
        }
        Ok(())
    }
}

/// Coefficient of a combination term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coeff {
    Exact(Rational),
    Complex(DecimalComplex),
}

impl Coeff {
    pub fn int(v: i64) -> Self {
        Coeff::Exact(Rational::from(v))
    }

    pub fn to_complex(&self, prec: u32) -> HPComplex {
        match self {
            Coeff::Exact(r) => HPComplex::from_real(Float::with_val(prec, r)),
            Coeff::Complex(d) => HPComplex::from_decimal(d, prec).expect("malformed decimal coefficient"),
        }
    }
}

/// Linear combination `Σ coeff · F_m(·, s, k)|W_Q` with shared `(s, k, N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareCombo {
    pub terms: Vec<(Coeff, PoincareSpec)>,
}

impl PoincareCombo {
    pub fn new(terms: Vec<(Coeff, PoincareSpec)>) -> Result<Self> {
        let combo = Self { terms };
        combo.validate()?;
        Ok(combo)
    }

    pub fn validate(&self) -> Result<()> {
        let Some((_, first)) = self.terms.first() else {
            return Ok(());
        };
        for (_, spec) in &self.terms {
            spec.validate_shape()?;
            if spec.s != first.s || spec.k != first.k || spec.n != first.n {
                return Err(Error::InvalidInput("combination terms must share s, k and N".into()));
            }
        }
        Ok(())
    }

    pub fn weight(&self) -> i64 {
        self.terms.first().map_or(0, |(_, s)| s.k)
    }

    pub fn level(&self) -> i64 {
        self.terms.first().map_or(1, |(_, s)| s.n)
    }

    pub fn s(&self) -> f64 {
        self.terms.first().map_or(1.0, |(_, s)| s.s)
    }

    /// `Σ_Q sign_Q · coeff · F_m|W_Q` over `(Q, sign_Q)` pairs.
    pub fn al_pattern(coeff: i64, m: u64, s: f64, k: i64, n: i64, pattern: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            pattern
                .iter()
                .map(|&(q, sign)| (Coeff::int(coeff * sign), PoincareSpec::new(m, s, k, n).with_al(q)))
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// The weight-0 Γ₀(6) function with expansion `q^{-1} - 4 - 83q + …`.
    Gamma06F,
    /// `j - 744` on SL₂(ℤ).
    J,
}

/// Input function for a trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormSpec {
    ClosedForm(ClosedForm),
    Poincare(PoincareCombo),
}

impl FormSpec {
    pub fn weight(&self) -> i64 {
        match self {
            FormSpec::ClosedForm(_) => 0,
            FormSpec::Poincare(c) => c.weight(),
        }
    }

    pub fn level(&self) -> i64 {
        match self {
            FormSpec::ClosedForm(ClosedForm::Gamma06F) => 6,
            FormSpec::ClosedForm(ClosedForm::J) => 1,
            FormSpec::Poincare(c) => c.level(),
        }
    }

    /// `∂f = R^k_{-2k} f` at `z`; for weight 0 this is `f` itself.
    pub fn eval_partial(&self, z: &HPComplex, ctx: &PrecCtx) -> Result<EvalValue> {
        match self {
            FormSpec::ClosedForm(name) => {
                let value = match name {
                    ClosedForm::Gamma06F => gamma0_6_f(z, ctx),
                    ClosedForm::J => j_minus_744(z, ctx),
                };
                Ok(EvalValue {
                    value,
                    trunc_estimate: 0.0,
                    rows: 0,
                    c_max: 0,
                })
            }
            FormSpec::Poincare(combo) => eval_df(combo, z, ctx),
        }
    }
}

/// A computed value with its truncation diagnostics.
#[derive(Clone, Debug)]
pub struct EvalValue {
    pub value: HPComplex,
    /// Estimated absolute truncation error.
    pub trunc_estimate: f64,
    pub rows: usize,
    pub c_max: i64,
}

/// `𝓜_{s,k}(y) = y^{-k/2} M_{-k/2, s-1/2}(y) = y^{s-k/2} e^{-y/2} M(s + k/2, 2s, y)`.
pub fn whittaker_m_cal(s: &Float, k: i64, y: &Float, ctx: &PrecCtx) -> Result<Float> {
    let w = ctx.working();
    let inner = ctx.as_requested_working();
    let half_k = Float::with_val(w, k) / 2u32;
    let a = Float::with_val(w, s + &half_k);
    let b = Float::with_val(w, s * 2u32);
    let m = kummer_m(&a, &b, y, &inner)?;
    let expo = Float::with_val(w, s - &half_k) * Float::with_val(w, y.ln_ref()) - Float::with_val(w, y / 2u32);
    Ok(m * expo.exp())
}

/// `Γ(x)`, in closed form when `2x` is an integer.
pub(crate) fn gamma_real(x: f64, ctx: &PrecCtx) -> Float {
    let two_x = 2.0 * x;
    if two_x.fract() == 0.0 && two_x >= 1.0 {
        Float::with_val(ctx.working(), gamma_half(two_x as u32, &ctx.as_requested_working()))
    } else {
        Float::with_val(ctx.working(), x).gamma()
    }
}

/// Bottom rows `(c, d)` of `Γ∞\Γ₀(N)` with completions: `(0, ±1)` and all
/// `0 < |c| ≤ c_max`, `N | c`, `gcd(c, d) = 1`, `|d| ≤ d_max`.
pub fn coset_rows(n: i64, c_max: i64, d_max: i64) -> Vec<Mat2> {
    let mut rows = vec![Mat2::IDENTITY, Mat2::IDENTITY.neg()];
    let mut c = n;
    while c <= c_max {
        for sign in [1, -1] {
            for d in -d_max..=d_max {
                if let Some(g) = complete_row(sign * c, d) {
                    rows.push(g);
                }
            }
        }
        c += n;
    }
    rows
}

/// A matrix `(a b; c d) ∈ SL₂(ℤ)` with the given bottom row.
pub fn complete_row(c: i64, d: i64) -> Option<Mat2> {
    let (g, u, v) = egcd(d, c);
    // u·d + v·c = 1
    (g == 1).then(|| Mat2::new(u, -v, c, d))
}

/// Rows actually summed at a point, with the cutoff that produced them.
#[derive(Clone, Debug)]
pub struct RowPlan {
    /// `(0, 1)` first, then `c > 0` ascending and `d` ascending.
    pub rows: Vec<Mat2>,
    /// Rows satisfy `|cz + d|² ≤ l_cut`.
    pub l_cut: f64,
    pub c_max: i64,
    pub trunc_estimate: f64,
}

fn ln_gamma_f64(x: f64) -> f64 {
    Float::with_val(64, x).ln_gamma().to_f64()
}

/// Chooses rows so that the estimated tail is below the requested floor.
///
/// Tail model: `|term| ≈ (4πmy)^{s-k/2} |cz+d|^{-2s}` summed over lattice
/// points with `|cz+d|² > L`, which gives
/// `(4πmy)^{s-k/2} π L^{1-s} / ((s-1) N y) / (2Γ(2s))`.
pub fn plan_rows(spec: &PoincareSpec, z: &HPComplex, ctx: &PrecCtx) -> Result<RowPlan> {
    spec.validate()?;
    let (x, y) = (z.re.to_f64(), z.im.to_f64());
    let s = spec.s;
    let n = spec.n as f64;
    let big_y = 4.0 * std::f64::consts::PI * spec.m as f64 * y;
    let floor = spec
        .term_floor
        .unwrap_or_else(|| 2f64.powi(-(ctx.prec_bits as i32) / 2));
    // ln of the leading term 𝓜(Y)/Γ(2s), using M(a,b,Y) ≥ 1 as a lower bound
    let half_k = spec.k as f64 / 2.0;
    let ln_lead = (s - half_k) * big_y.ln() - big_y / 2.0 - ln_gamma_f64(2.0 * s);
    let ln_tail_coeff = (s - half_k) * big_y.ln() + std::f64::consts::PI.ln()
        - ((s - 1.0) * n * y).ln()
        - std::f64::consts::LN_2
        - ln_gamma_f64(2.0 * s);
    // tail(L) = exp(ln_tail_coeff) L^{1-s} ≤ floor·lead
    let ln_l = (ln_tail_coeff - ln_lead - floor.ln()) / (s - 1.0);
    let mut l_cut = ln_l.exp().max(1.0);
    let mut c_max = (l_cut.sqrt() / y).floor() as i64;
    c_max -= c_max.rem_euclid(spec.n);
    if let Some(cap) = spec.c_max {
        if cap < c_max {
            c_max = cap.max(0) - cap.max(0).rem_euclid(spec.n);
            // keep the row set a disc: stop just short of the first excluded c
            l_cut = l_cut.min(((c_max + spec.n) as f64 * y).powi(2) * (1.0 - 1e-12));
        }
    }
    let mut rows = vec![Mat2::IDENTITY];
    let mut c = spec.n;
    while c <= c_max {
        let cy = c as f64 * y;
        let rem = l_cut - cy * cy;
        if rem >= 0.0 {
            let r = rem.sqrt();
            let center = -(c as f64) * x;
            let lo = (center - r).floor() as i64;
            let hi = (center + r).ceil() as i64;
            for d in lo..=hi {
                let u = c as f64 * x + d as f64;
                if u * u + cy * cy > l_cut || gcd(c, d) != 1 {
                    continue;
                }
                rows.push(complete_row(c, d).expect("coprime row"));
            }
        }
        c += spec.n;
    }
    let trunc_estimate = (ln_tail_coeff + (1.0 - s) * l_cut.ln()).exp();
    Ok(RowPlan {
        rows,
        l_cut,
        c_max,
        trunc_estimate,
    })
}

/// `[𝓜_{s,k}(4πmy) e(-mx)]|_k γ` at `z` (no `1/Γ(2s)`).
pub fn row_term(spec: &PoincareSpec, g: &Mat2, z: &HPComplex, ctx: &PrecCtx) -> Result<HPComplex> {
    let w = ctx.working();
    let z = z.with_prec(w);
    let gz = g.act(&z);
    let two_pi_m = pi(w) * 2u32 * spec.m;
    let big_y = Float::with_val(w, &gz.im * &two_pi_m) * 2u32;
    let s = Float::with_val(w, spec.s);
    let m_cal = whittaker_m_cal(&s, spec.k, &big_y, ctx)?;
    let theta = -Float::with_val(w, &gz.re * &two_pi_m);
    let mut term = HPComplex::expi(&theta).scale(&m_cal);
    if spec.k != 0 {
        term = &term * &g.cocycle(&z).powi(-spec.k);
    }
    Ok(term)
}

/// Sum over a fixed row plan (no Atkin-Lehner word), divided by `Γ(2s)`.
pub fn eval_poincare_rows(spec: &PoincareSpec, z: &HPComplex, rows: &[Mat2], ctx: &PrecCtx) -> Result<HPComplex> {
    spec.validate()?;
    let w = ctx.working();
    let terms: Vec<HPComplex> = rows
        .par_iter()
        .map(|g| row_term(spec, g, z, ctx))
        .collect::<Result<_>>()?;
    let mut acc = CompensatedComplexSum::new(w);
    for t in &terms {
        acc.add(t);
    }
    let g2s = gamma_real(2.0 * spec.s, ctx);
    Ok(acc.value().scale(&g2s.recip()))
}

/// `F_m(z, s, k)` (or `F_m|_k W_Q` when `al_word` is set) with an adaptive row plan.
pub fn eval_poincare(spec: &PoincareSpec, z: &HPComplex, ctx: &PrecCtx) -> Result<EvalValue> {
    spec.validate()?;
    let w = ctx.working();
    let z = z.with_prec(w);
    let (point, factor) = match spec.al_word {
        Some(q) => {
            let al = atkin_lehner_matrix(spec.n, q)?;
            let factor = (spec.k != 0).then(|| al.cocycle(&z).powi(-spec.k));
            (al.act(&z), factor)
        }
        None => (z, None),
    };
    let plan = plan_rows(spec, &point, ctx)?;
    let mut value = eval_poincare_rows(spec, &point, &plan.rows, ctx)?;
    let mut trunc = plan.trunc_estimate;
    if let Some(f) = factor {
        trunc *= f.abs().to_f64();
        value = &value * &f;
    }
    Ok(EvalValue {
        value,
        trunc_estimate: trunc,
        rows: plan.rows.len(),
        c_max: plan.c_max,
    })
}

/// `(4πm)^k ∏_{j<k}(s+j-k)`, the factor relating `R^k_{-2k} F_m(·,s,-2k)` to `F_m(·,s,0)`.
pub fn raising_factor(m: u64, s: f64, kk: i64, prec: u32) -> Float {
    let mut f = Float::with_val(prec, 1);
    let four_pi_m = pi(prec) * 4u32 * m;
    for j in 0..kk {
        f *= &four_pi_m;
        f *= Float::with_val(prec, s + (j - kk) as f64);
    }
    f
}

/// `∂f` for a weight `-2k` combination: each term becomes
/// `(4πm)^k ∏(s+j-k) · F_m(W z, s, 0)`, evaluated at a Γ₀(N)-reduced point.
pub fn eval_df(combo: &PoincareCombo, z: &HPComplex, ctx: &PrecCtx) -> Result<EvalValue> {
    combo.validate()?;
    let w = ctx.working();
    let z = z.with_prec(w);
    let mut acc = CompensatedComplexSum::new(w);
    let mut trunc = 0.0;
    let mut rows = 0;
    let mut c_max = 0;
    for (coeff, spec) in &combo.terms {
        let weight = -spec.k;
        if weight < 0 || weight % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "eval_df needs weight -2k ≤ 0, got {}",
                spec.k
            )));
        }
        let kk = weight / 2;
        let point = match spec.al_word {
            Some(q) => atkin_lehner_matrix(spec.n, q)?.act(&z),
            None => z.clone(),
        };
        let (reduced, _) = reduce_gamma0(&point, spec.n, ctx);
        let weight0 = PoincareSpec {
            k: 0,
            al_word: None,
            ..spec.clone()
        };
        let v = eval_poincare(&weight0, &reduced, ctx)?;
        let f = Float::with_val(w, raising_factor(spec.m, spec.s, kk, w));
        let c = coeff.to_complex(w);
        let scaled = &v.value.scale(&f) * &c;
        trunc += v.trunc_estimate * f.to_f64() * c.abs().to_f64();
        rows += v.rows;
        c_max = c_max.max(v.c_max);
        acc.add(&scaled);
    }
    Ok(EvalValue {
        value: acc.value(),
        trunc_estimate: trunc,
        rows,
        c_max,
    })
}
