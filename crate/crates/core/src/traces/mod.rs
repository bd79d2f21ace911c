//! Twisted traces `Tr_{Δ,r}(f; d, h) = Σ_Q χ_Δ(Q) ∂f(α_Q) / |Γ̄_Q|` over
//! Γ₀(N)-classes of forms of discriminant `-d|Δ|` with `b ≡ rh (mod 2N)`.
//!
//! Traces are indexed by the integer `d`; the lattice index used by the lift
//! is `m = d / (4N)`.

mod cache;

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numkernel::sum::CompensatedComplexSum;
use crate::numkernel::{DecimalComplex, HPComplex, PrecCtx};
use crate::poincare::{lift_principal_part, FormSpec, Parity, PoincareCombo};
use crate::quadforms::{enumerate_classes, genus_char, heegner_point, ClassSet, QuadForm, SignMode, TwistParams};

pub use cache::TraceCache;

const CACHE_FORMAT: &str = "trace-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRequest {
    pub tw: TwistParams,
    pub d: i64,
    pub h: i64,
    pub f: FormSpec,
    pub sign_mode: SignMode,
}

impl TraceRequest {
    /// Request with both signs of definite forms.
    pub fn new(tw: TwistParams, d: i64, h: i64, f: FormSpec) -> Result<Self> {
        Self::with_sign_mode(tw, d, h, f, SignMode::Both)
    }

    pub fn with_sign_mode(tw: TwistParams, d: i64, h: i64, f: FormSpec, sign_mode: SignMode) -> Result<Self> {
        let n = f.level();
        if d <= 0 {
            return Err(Error::InvalidInput(format!("d must be positive, got {d}")));
        }
        let rh = tw.r * h;
        if (rh * rh + d * tw.delta.abs()).rem_euclid(4 * n) != 0 {
            return Err(Error::InvalidInput(format!(
                "(r·h)² = {} is not -{} mod {}",
                rh * rh,
                d * tw.delta.abs(),
                4 * n
            )));
        }
        Ok(Self {
            tw,
            d,
            h: h.rem_euclid(2 * n),
            f,
            sign_mode,
        })
    }

    pub fn level(&self) -> i64 {
        self.f.level()
    }

    /// `(D, ρ)` of the class set: discriminant `-d|Δ|`, `b ≡ r·h (mod 2N)`.
    pub fn class_key(&self) -> (i64, i64) {
        let n = self.level();
        (self.d * self.tw.delta.abs(), (self.tw.r * self.h).rem_euclid(2 * n))
    }

    /// SHA-256 of the canonical serialization together with the precision context.
    pub fn cache_key(&self, ctx: &PrecCtx) -> String {
        let canonical = serde_json::to_string(&(CACHE_FORMAT, self, ctx)).expect("request serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub form: QuadForm,
    pub chi: i32,
    pub stab: usize,
    pub cm_point: DecimalComplex,
    /// `∂f(α_Q)`; absent when `χ = 0`.
    pub cm_value: Option<DecimalComplex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub request: TraceRequest,
    pub prec_bits: u32,
    pub value: DecimalComplex,
    pub rows: Vec<ClassRow>,
    /// Sum of the absolute truncation estimates of the CM values, weighted like the trace.
    pub trunc_estimate: f64,
    pub c_max: i64,
    pub cache_key: String,
}

impl TraceReport {
    pub fn value(&self) -> HPComplex {
        HPComplex::from_decimal(&self.value, self.prec_bits).expect("report holds valid decimals")
    }
}

/// Evaluates `∂f` at each distinct Heegner point once (`α_{-Q} = α_Q`).
fn cm_values(f: &FormSpec, forms: &[QuadForm], ctx: &PrecCtx) -> Result<Vec<(HPComplex, f64, i64)>> {
    let mut keys: Vec<QuadForm> = forms.iter().map(|q| if q.a < 0 { q.neg() } else { *q }).collect();
    keys.sort();
    keys.dedup();
    let evaluated: Vec<(QuadForm, (HPComplex, f64, i64))> = keys
        .par_iter()
        .map(|q| {
            let v = f.eval_partial(&heegner_point(q, ctx), ctx)?;
            Ok((*q, (v.value, v.trunc_estimate, v.c_max)))
        })
        .collect::<Result<_>>()?;
    let table: HashMap<QuadForm, (HPComplex, f64, i64)> = evaluated.into_iter().collect();
    Ok(forms
        .iter()
        .map(|q| table[&if q.a < 0 { q.neg() } else { *q }].clone())
        .collect())
}

fn trace_with_classes(req: &TraceRequest, classes: &ClassSet, ctx: &PrecCtx) -> Result<TraceReport> {
    let n = req.level();
    let w = ctx.working();
    let forms: Vec<QuadForm> = classes.reps.iter().map(|c| c.form()).collect();
    let chis: Vec<i32> = forms.iter().map(|q| genus_char(q, &req.tw, n)).collect::<Result<_>>()?;
    let live: Vec<QuadForm> = forms
        .iter()
        .zip(&chis)
        .filter(|(_, &c)| c != 0)
        .map(|(q, _)| *q)
        .collect();
    let mut values = cm_values(&req.f, &live, ctx)?.into_iter();

    let mut acc = CompensatedComplexSum::new(w);
    let mut trunc = 0.0;
    let mut c_max = 0;
    let mut rows = Vec::with_capacity(forms.len());
    for ((q, &chi), rep) in forms.iter().zip(&chis).zip(&classes.reps) {
        let point = heegner_point(q, ctx);
        let cm_value = if chi != 0 {
            let (v, t, c) = values.next().expect("one value per live class");
            let weight = Float::with_val(w, chi) / rep.stab as u32;
            acc.add(&v.scale(&weight));
            trunc += t / rep.stab as f64;
            c_max = c_max.max(c);
            Some(v.to_decimal(ctx.prec_bits))
        } else {
            None
        };
        rows.push(ClassRow {
            form: *q,
            chi,
            stab: rep.stab,
            cm_point: point.to_decimal(ctx.prec_bits),
            cm_value,
        });
    }
    Ok(TraceReport {
        request: req.clone(),
        prec_bits: ctx.prec_bits,
        value: acc.value().to_decimal(ctx.prec_bits),
        rows,
        trunc_estimate: trunc,
        c_max,
        cache_key: req.cache_key(ctx),
    })
}

fn classes_for(req: &TraceRequest) -> Result<ClassSet> {
    let (big_d, rho) = req.class_key();
    enumerate_classes(big_d, rho, req.level(), req.sign_mode)
}

/// The trace, computed from scratch.
pub fn trace(req: &TraceRequest, ctx: &PrecCtx) -> Result<TraceReport> {
    trace_with_classes(req, &classes_for(req)?, ctx)
}

/// The trace, served from `cache` when an entry with the same key exists.
pub fn trace_cached(req: &TraceRequest, ctx: &PrecCtx, cache: &TraceCache) -> Result<TraceReport> {
    let key = req.cache_key(ctx);
    if let Some(hit) = cache.get(&key) {
        return Ok(hit);
    }
    let report = trace(req, ctx)?;
    cache.insert(report.clone())?;
    Ok(report)
}

/// Value and diagnostics of a linear combination of traces.
#[derive(Clone, Debug)]
pub struct CombinationResult {
    pub value: HPComplex,
    pub reports: Vec<TraceReport>,
}

/// `Σ coeff · Tr(req)`, sharing class enumeration between requests with equal
/// class data and reusing cached reports.
pub fn trace_combination(
    terms: &[(HPComplex, TraceRequest)],
    ctx: &PrecCtx,
    cache: Option<&TraceCache>,
) -> Result<CombinationResult> {
    let w = ctx.working();
    if let Some((_, first)) = terms.first() {
        if terms.iter().any(|(_, r)| r.level() != first.level()) {
            return Err(Error::InvalidInput("combined traces must share N".into()));
        }
    }
    let class_cache: Mutex<HashMap<(i64, i64, SignMode), ClassSet>> = Mutex::new(HashMap::new());
    let mut acc = CompensatedComplexSum::new(w);
    let mut reports = Vec::with_capacity(terms.len());
    for (coeff, req) in terms {
        let key = req.cache_key(ctx);
        let report = match cache.and_then(|c| c.get(&key)) {
            Some(hit) => hit,
            None => {
                let (big_d, rho) = req.class_key();
                let classes = {
                    let mut map = class_cache.lock().expect("class cache lock");
                    match map.get(&(big_d, rho, req.sign_mode)) {
                        Some(c) => c.clone(),
                        None => {
                            let c = classes_for(req)?;
                            map.insert((big_d, rho, req.sign_mode), c.clone());
                            c
                        }
                    }
                };
                let report = trace_with_classes(req, &classes, ctx)?;
                if let Some(c) = cache {
                    c.insert(report.clone())?;
                }
                report
            }
        };
        acc.add(&(&report.value().with_prec(w) * coeff));
        reports.push(report);
    }
    Ok(CombinationResult {
        value: acc.value(),
        reports,
    })
}

/// One holomorphic coefficient `c⁺(index, h)` of the dual form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCoeff {
    pub index: Rational,
    pub h: i64,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub struct DualityResidual {
    pub lhs: HPComplex,
    pub rhs: HPComplex,
    pub residual: HPComplex,
    /// Largest absolute value among the individual terms of either side.
    pub scale: Float,
}

/// `Σ c⁺(-m, h) Tr(f; m, h) + Σ c⁺(m', h) a_Λ(-m', h)`.
///
/// Entries with negative index pair with traces at `d = 4N·m`; entries with
/// positive index pair with the principal part of the lift of `lift_of` (the
/// same `f` written as Poincaré series). Index-zero entries are ignored.
pub fn duality_residual(
    coeffs: &[DualCoeff],
    f: &FormSpec,
    lift_of: &PoincareCombo,
    tw: &TwistParams,
    parity: Parity,
    ctx: &PrecCtx,
) -> Result<DualityResidual> {
    let w = ctx.working();
    let n = f.level();
    let mut lhs = CompensatedComplexSum::new(w);
    let mut rhs = CompensatedComplexSum::new(w);
    let mut scale = Float::new(w);
    let pp = if coeffs.iter().any(|c| c.index > 0) {
        lift_principal_part(lift_of, tw, parity, ctx)?
    } else {
        Vec::new()
    };
    for c in coeffs {
        if c.value == 0 || c.index == 0 {
            continue;
        }
        let value = Float::with_val(w, &c.value);
        let term = if c.index < 0 {
            let d = -c.index.clone() * Rational::from(4 * n);
            if !d.denom().eq(&1) {
                return Err(Error::InvalidInput(format!("index {} is not in (1/4N)Z", c.index)));
            }
            let d = d.numer().to_i64().expect("index fits in i64");
            let req = TraceRequest::new(*tw, d, c.h, f.clone())?;
            let t = trace(&req, ctx)?.value().with_prec(w).scale(&value);
            lhs.add(&t);
            t
        } else {
            let target = -c.index.clone();
            let a = pp
                .iter()
                .filter(|t| t.exponent == target && t.h == c.h.rem_euclid(2 * n))
                .fold(HPComplex::zero(w), |acc, t| &acc + &t.coeff);
            let t = -a.scale(&value);
            rhs.add(&t);
            t
        };
        scale = scale.max(&term.abs());
    }
    let (lhs, rhs) = (lhs.value(), rhs.value());
    let residual = &lhs - &rhs;
    Ok(DualityResidual {
        lhs,
        rhs,
        residual,
        scale,
    })
}
