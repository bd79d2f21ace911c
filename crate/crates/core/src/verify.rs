//! Verification checks: each compares an exact oracle value with a trace
//! computation and produces a [`CheckReport`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::arith::is_fundamental_discriminant;
use crate::numkernel::{pi, HPComplex, PrecCtx};
use crate::poincare::{
    lift_constant_odd, lift_principal_part, odd_coefficient_factor, ClosedForm, FormSpec, OddConstant, Parity,
    PoincareCombo, PrincipalTerm,
};
use crate::qseries::{eta_power_coeffs, mock_theta_coeffs};
use crate::quadforms::{SignMode, TwistParams};
use crate::traces::{duality_residual, trace_combination, DualCoeff, TraceCache, TraceRequest};

pub const DEFAULT_PREC: u32 = 128;
pub const DEFAULT_PREC_ETA25: u32 = 256;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_TOL_ETA25: f64 = 1e-6;
pub const DEFAULT_TOL_DUALITY: f64 = 1e-8;

/// Printed constant of the η^{-25} identity, `-185725 / 4429185024`, times `π^{-13}`.
pub const ETA25_PRINTED: (i64, i64) = (-185725, 4429185024);
/// Constant the η^{-25} identity actually needs, times `π^{-13}`.
pub const ETA25_DERIVED: (i64, i64) = (33, 4429185024);

/// Residues mod 12 carrying the `χ₁₂` pattern.
const LEVEL6_RESIDUES: [i64; 4] = [1, 5, 7, 11];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `None` selects the per-check default.
    pub prec_bits: Option<u32>,
    pub tolerance: Option<f64>,
    pub c_max: Option<i64>,
    pub cache_path: Option<PathBuf>,
    pub format: OutputFormat,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// When false, `wall_ms` is reported as 0 so reports are byte-reproducible.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            prec_bits: None,
            tolerance: None,
            c_max: None,
            cache_path: None,
            format: OutputFormat::Json,
            threads: None,
            timing: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.prec_bits {
            if p < 64 {
                return Err(Error::InvalidInput(format!(
                    "precision must be at least 64 bits, got {p}"
                )));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidInput(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(c) = self.c_max {
            if c < 0 {
                return Err(Error::InvalidInput(format!("c_max must be non-negative, got {c}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidInput("thread count must be positive".into()));
        }
        Ok(())
    }

    fn ctx(&self, default_prec: u32) -> PrecCtx {
        PrecCtx::new(self.prec_bits.unwrap_or(default_prec))
    }

    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    fn cache(&self) -> Result<Option<TraceCache>> {
        self.cache_path.as_ref().map(TraceCache::open).transpose()
    }

    /// Runs `f` on a pool with the configured number of threads.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
    pub abs_residual: String,
    pub rel_residual: String,
    pub pass: bool,
    pub prec_bits: u32,
    pub c_max: i64,
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, String>,
}

impl CheckReport {
    pub fn abs_residual(&self) -> f64 {
        self.abs_residual.parse().unwrap_or(f64::INFINITY)
    }

    pub fn rel_residual(&self) -> f64 {
        self.rel_residual.parse().unwrap_or(f64::INFINITY)
    }
}

fn sig(x: &Float) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_integer() && x.get_exp().is_some_and(|e| e <= 100) {
        return x.to_integer().expect("finite").to_string();
    }
    x.to_string_radix(10, Some(30))
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

fn inputs(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

struct Comparison {
    lhs: Float,
    rhs: HPComplex,
    /// Reference size for the relative residual; `|lhs|` unless overridden.
    scale: Option<Float>,
}

struct Timer(Option<Instant>);

impl Timer {
    fn start(cfg: &RunConfig) -> Self {
        Timer(cfg.timing.then(Instant::now))
    }

    fn ms(&self) -> u64 {
        self.0.map_or(0, |t| t.elapsed().as_millis() as u64)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    check: &str,
    inputs: BTreeMap<String, String>,
    cmp: Comparison,
    tol: f64,
    ctx: &PrecCtx,
    c_max: i64,
    timer: &Timer,
    mut diagnostics: BTreeMap<String, String>,
) -> CheckReport {
    let w = ctx.working();
    let diff = &HPComplex::from_real(cmp.lhs.clone()).with_prec(w) - &cmp.rhs;
    let abs = diff.abs();
    let scale = cmp.scale.unwrap_or_else(|| cmp.lhs.clone().abs());
    let rel = if scale.is_zero() {
        abs.clone()
    } else {
        Float::with_val(w, &abs / &scale)
    };
    if !cmp.rhs.im.is_zero() {
        diagnostics.insert("rhs_im".into(), sig(&cmp.rhs.im));
    }
    let rel_f = rel.to_f64();
    CheckReport {
        check: check.to_string(),
        inputs,
        lhs: sig(&cmp.lhs),
        rhs: sig(&cmp.rhs.re),
        abs_residual: sci(abs.to_f64()),
        rel_residual: sci(rel_f),
        pass: rel_f <= tol,
        prec_bits: ctx.prec_bits,
        c_max,
        wall_ms: timer.ms(),
        diagnostics,
    }
}

fn gamma06() -> FormSpec {
    FormSpec::ClosedForm(ClosedForm::Gamma06F)
}

fn max_c(reports: &[crate::traces::TraceReport]) -> i64 {
    reports.iter().map(|r| r.c_max).max().unwrap_or(0)
}

/// `a_f((|Δ|+1)/24) = -(1/(8i√|Δ|)) (Tr(F;1,1) - Tr(F;1,5) + Tr(F;1,7) - Tr(F;1,11))`.
pub fn cmd_mock_theta(delta: i64, cfg: &RunConfig) -> Result<CheckReport> {
    if delta >= 0 || !is_fundamental_discriminant(delta) || delta.rem_euclid(24) != 1 {
        return Err(Error::InvalidDiscriminant(
            delta,
            "need a negative fundamental discriminant = 1 mod 24".into(),
        ));
    }
    let timer = Timer::start(cfg);
    let ctx = cfg.ctx(DEFAULT_PREC);
    let w = ctx.working();
    let index = ((delta.abs() + 1) / 24) as usize;
    let lhs = Float::with_val(w, mock_theta_coeffs(index.max(1)).coeff(index));

    let tw = TwistParams::new(delta, 1, 6)?;
    let terms = LEVEL6_RESIDUES
        .iter()
        .zip([1, -1, 1, -1])
        .map(|(&h, s)| Ok((HPComplex::from_i64(w, s, 0), TraceRequest::new(tw, 1, h, gamma06())?)))
        .collect::<Result<Vec<_>>>()?;
    let cache = cfg.cache()?;
    let combo = trace_combination(&terms, &ctx, cache.as_ref())?;
    // -1/(8i√|Δ|) = i/(8√|Δ|)
    let factor = Float::with_val(w, 8u32) * tw.sqrt_abs_delta(w);
    let rhs = combo.value.mul_i().scale(&factor.recip());
    Ok(finish(
        "mock_theta",
        inputs(&[("delta", delta.to_string()), ("r", "1".into()), ("N", "6".into())]),
        Comparison { lhs, rhs, scale: None },
        cfg.tol(DEFAULT_TOL),
        &ctx,
        max_c(&combo.reports),
        &timer,
        BTreeMap::new(),
    ))
}

fn with_c_max(mut combo: PoincareCombo, c_max: Option<i64>) -> PoincareCombo {
    if let Some(c) = c_max {
        for (_, spec) in &mut combo.terms {
            spec.c_max = Some(c);
        }
    }
    combo
}

/// The two weight -26 combinations whose traces give the η^{-25} coefficients.
pub fn eta25_forms() -> (PoincareCombo, PoincareCombo) {
    let f =
        PoincareCombo::al_pattern(1, 5, 14.0, -26, 6, &[(1, -1), (2, 1), (3, 1), (6, -1)]).expect("valid combination");
    let ft = PoincareCombo::al_pattern(25 + 5i64.pow(13), 1, 14.0, -26, 6, &[(1, 1), (2, -1), (3, -1), (6, 1)])
        .expect("valid combination");
    (f, ft)
}

fn const_over_pi13(c: (i64, i64), w: u32) -> Float {
    let q = Float::with_val(w, &Rational::from(c));
    let mut p = Float::with_val(w, 1);
    let pw = pi(w);
    for _ in 0..13 {
        p *= &pw;
    }
    q / p
}

/// Coefficient `n+1` of `∏(1-q^j)^{-25}` against the printed constant times
/// `(24n-1)^{-7} (Tr(F; 24n-1, 1) + Tr(F̃; 24n-1, 1))`.
///
/// Diagnostics carry `ratio = lhs (24n-1)^7 / (trace sum)` and the residual
/// obtained with the constant derived from the lift.
pub fn cmd_eta25(n: u32, cfg: &RunConfig) -> Result<CheckReport> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let timer = Timer::start(cfg);
    let ctx = cfg.ctx(DEFAULT_PREC_ETA25);
    let w = ctx.working();
    let series = eta_power_coeffs(-25, n as usize + 1)?;
    let lhs = Float::with_val(w, series.coeff(n as usize + 1));

    let d = 24 * n as i64 - 1;
    let tw = TwistParams::untwisted();
    let (f, ft) = eta25_forms();
    let one = HPComplex::one(w);
    let terms = vec![
        (
            one.clone(),
            TraceRequest::new(tw, d, 1, FormSpec::Poincare(with_c_max(f, cfg.c_max)))?,
        ),
        (
            one,
            TraceRequest::new(tw, d, 1, FormSpec::Poincare(with_c_max(ft, cfg.c_max)))?,
        ),
    ];
    let cache = cfg.cache()?;
    let combo = trace_combination(&terms, &ctx, cache.as_ref())?;
    let pow7 = Float::with_val(w, d).pow_i(7);
    let traces = combo.value.scale(&pow7.clone().recip());
    let rhs = traces.scale(&const_over_pi13(ETA25_PRINTED, w));

    let mut diag = BTreeMap::new();
    let ratio = Float::with_val(w, &lhs / &traces.re);
    diag.insert("ratio".into(), sig(&ratio));
    diag.insert("ratio_printed".into(), sig(&const_over_pi13(ETA25_PRINTED, w)));
    let derived = eta25_derived_constant(&ctx);
    diag.insert("ratio_derived".into(), sig(&derived));
    let rhs_derived = traces.scale(&derived);
    let rel_derived = (&HPComplex::from_real(lhs.clone()) - &rhs_derived).abs() / lhs.clone().abs();
    diag.insert("rhs_derived".into(), sig(&rhs_derived.re));
    diag.insert("rel_residual_derived".into(), sci(rel_derived.to_f64()));
    diag.insert("trace_F".into(), sig(&combo.reports[0].value().re));
    diag.insert("trace_F_tilde".into(), sig(&combo.reports[1].value().re));
    Ok(finish(
        "eta25",
        inputs(&[("n", n.to_string()), ("d", d.to_string()), ("N", "6".into())]),
        Comparison { lhs, rhs, scale: None },
        cfg.tol(DEFAULT_TOL_ETA25),
        &ctx,
        max_c(&combo.reports),
        &timer,
        diag,
    ))
}

/// `(24n-1)^7`-free constant from the lift: `(1/(2Cᵒ)) · (6/π)^7 ∏(13/2+j)(j-7)`.
pub fn eta25_derived_constant(ctx: &PrecCtx) -> Float {
    let w = ctx.working();
    let co = lift_constant_odd(13, 14.0, 6, &TwistParams::untwisted(), OddConstant::Corrected, ctx);
    // m = d/24 with d = 1 gives the d-independent part of the odd factor
    let factor = odd_coefficient_factor(13, &Rational::from((1, 24)), ctx);
    Float::with_val(w, &factor / &co.re) / 2u32
}

/// `Tr_{1,1}(J; d, d mod 2)` over positive definite forms, compared with the nearest integer.
pub fn cmd_zagier(d: i64, cfg: &RunConfig) -> Result<CheckReport> {
    if d <= 0 || !matches!(d.rem_euclid(4), 0 | 3) {
        return Err(Error::InvalidInput(format!("-{d} is not a discriminant")));
    }
    let timer = Timer::start(cfg);
    let ctx = cfg.ctx(DEFAULT_PREC);
    let w = ctx.working();
    let req = TraceRequest::with_sign_mode(
        TwistParams::untwisted(),
        d,
        d % 2,
        FormSpec::ClosedForm(ClosedForm::J),
        SignMode::PositiveOnly,
    )?;
    let cache = cfg.cache()?;
    let combo = trace_combination(&[(HPComplex::one(w), req)], &ctx, cache.as_ref())?;
    let rhs = combo.value;
    let lhs = Float::with_val(w, rhs.re.round_ref());
    let mut diag = BTreeMap::new();
    diag.insert("kind".into(), "integrality".into());
    Ok(finish(
        "zagier",
        inputs(&[("d", d.to_string()), ("N", "1".into())]),
        Comparison { lhs, rhs, scale: None },
        cfg.tol(DEFAULT_TOL),
        &ctx,
        0,
        &timer,
        diag,
    ))
}

/// Integrality of `Tr_{1,1}(F; d, h)` for the Γ₀(6) function `F`: the numerical
/// shadow of the algebraicity of traces. Passes when within `2^{-prec/2}` of an integer.
pub fn cmd_integrality(d: i64, h: i64, cfg: &RunConfig) -> Result<CheckReport> {
    let timer = Timer::start(cfg);
    let ctx = cfg.ctx(DEFAULT_PREC);
    let w = ctx.working();
    let req = TraceRequest::new(TwistParams::untwisted(), d, h, gamma06())?;
    let cache = cfg.cache()?;
    let combo = trace_combination(&[(HPComplex::one(w), req)], &ctx, cache.as_ref())?;
    let rhs = combo.value;
    let lhs = Float::with_val(w, rhs.re.round_ref());
    let tol = cfg.tol(2f64.powi(-(ctx.prec_bits as i32) / 2));
    let mut diag = BTreeMap::new();
    diag.insert("kind".into(), "integrality (numerical shadow of algebraicity)".into());
    Ok(finish(
        "integrality",
        inputs(&[
            ("d", d.to_string()),
            ("h", h.to_string()),
            ("delta", "1".into()),
            ("N", "6".into()),
        ]),
        Comparison {
            lhs,
            rhs,
            scale: Some(Float::with_val(w, 0)),
        },
        tol,
        &ctx,
        0,
        &timer,
        diag,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualityInstance {
    MockTheta,
    Eta25,
    Empty,
}

impl std::str::FromStr for DualityInstance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mock_theta" | "mock-theta" => Ok(Self::MockTheta),
            "eta25" => Ok(Self::Eta25),
            "empty" => Ok(Self::Empty),
            _ => Err(Error::InvalidInput(format!("unknown duality instance {s}"))),
        }
    }
}

fn mock_theta_lift() -> PoincareCombo {
    PoincareCombo::al_pattern(1, 1, 1.0, 0, 6, &[(1, 1), (2, 1), (3, -1), (6, -1)]).expect("valid combination")
}

/// Pairing of a dual form's holomorphic coefficients with traces and with the
/// lift's principal part.
pub fn cmd_duality(instance: DualityInstance, cfg: &RunConfig) -> Result<CheckReport> {
    let timer = Timer::start(cfg);
    let ctx = cfg.ctx(DEFAULT_PREC);
    let w = ctx.working();
    let tol = cfg.tol(DEFAULT_TOL_DUALITY);
    match instance {
        DualityInstance::MockTheta => {
            let delta = -23i64;
            let tw = TwistParams::new(delta, 1, 6)?;
            let a_f = Rational::from(mock_theta_coeffs(1).coeff(1).clone());
            let mut coeffs = Vec::new();
            for (&h, s) in LEVEL6_RESIDUES.iter().zip([1, -1, 1, -1]) {
                coeffs.push(DualCoeff {
                    index: Rational::from((-1, 24)),
                    h,
                    value: Rational::from(s),
                });
                coeffs.push(DualCoeff {
                    index: Rational::from((delta.abs(), 24)),
                    h,
                    value: a_f.clone() * s,
                });
            }
            let r = duality_residual(&coeffs, &gamma06(), &mock_theta_lift(), &tw, Parity::Even, &ctx)?;
            let mut diag = BTreeMap::new();
            diag.insert("lhs_im".into(), sig(&r.lhs.im));
            diag.insert("rhs_im".into(), sig(&r.rhs.im));
            let abs = r.residual.abs();
            let rel = Float::with_val(w, &abs / &r.scale).to_f64();
            Ok(CheckReport {
                check: "duality".into(),
                inputs: inputs(&[("instance", "mock_theta".into()), ("delta", delta.to_string())]),
                lhs: sig(&r.lhs.re),
                rhs: sig(&r.rhs.re),
                abs_residual: sci(abs.to_f64()),
                rel_residual: sci(rel),
                pass: rel <= tol,
                prec_bits: ctx.prec_bits,
                c_max: 0,
                wall_ms: timer.ms(),
                diagnostics: diag,
            })
        }
        DualityInstance::Eta25 => {
            let (abs, rel, scale) = eta25_principal_part_residual(&ctx)?;
            Ok(CheckReport {
                check: "duality".into(),
                inputs: inputs(&[("instance", "eta25".into())]),
                lhs: "0".into(),
                rhs: "0".into(),
                abs_residual: sci(abs),
                rel_residual: sci(rel),
                pass: rel <= tol,
                prec_bits: ctx.prec_bits,
                c_max: 0,
                wall_ms: timer.ms(),
                diagnostics: [("scale".to_string(), sci(scale))].into_iter().collect(),
            })
        }
        DualityInstance::Empty => {
            let tw = TwistParams::untwisted();
            let r = duality_residual(&[], &gamma06(), &mock_theta_lift(), &tw, Parity::Even, &ctx)?;
            let exact = r.residual.is_zero();
            Ok(CheckReport {
                check: "duality".into(),
                inputs: inputs(&[("instance", "empty".into())]),
                lhs: "0".into(),
                rhs: "0".into(),
                abs_residual: sci(r.residual.abs().to_f64()),
                rel_residual: sci(r.residual.abs().to_f64()),
                pass: exact,
                prec_bits: ctx.prec_bits,
                c_max: 0,
                wall_ms: timer.ms(),
                diagnostics: BTreeMap::new(),
            })
        }
    }
}

/// Principal part of `Σ_r χ₁₂(r) η^{-25} 𝔢_r`: `(q^{-25/24} + 25 q^{-1/24})(𝔢₁ - 𝔢₅ - 𝔢₇ + 𝔢₁₁)`.
fn g25_principal_part() -> BTreeMap<(Rational, i64), Integer> {
    let series = eta_power_coeffs(-25, 1).expect("exact recurrence");
    let mut out = BTreeMap::new();
    for (&h, s) in LEVEL6_RESIDUES.iter().zip([1, -1, -1, 1]) {
        for (j, e24) in [(0usize, -25i64), (1, -1)] {
            out.insert((Rational::from((e24, 24)), h), Integer::from(series.coeff(j) * s));
        }
    }
    out
}

/// Max over `(exponent, h)` of `|pp(G₂₅) - pp(Λ(F) + Λ(F̃)) / (2Cᵒ)|`, with the
/// relative version and the largest term.
fn eta25_principal_part_residual(ctx: &PrecCtx) -> Result<(f64, f64, f64)> {
    let w = ctx.working();
    let tw = TwistParams::untwisted();
    let (f, ft) = eta25_forms();
    let co = lift_constant_odd(13, 14.0, 6, &tw, OddConstant::Corrected, ctx);
    let two_co = co.scale_i64(2).recip();
    let mut lifted: BTreeMap<(Rational, i64), HPComplex> = BTreeMap::new();
    for combo in [&f, &ft] {
        for PrincipalTerm { exponent, h, coeff } in lift_principal_part(combo, &tw, Parity::Odd, ctx)? {
            let slot = lifted.entry((exponent, h)).or_insert_with(|| HPComplex::zero(w));
            *slot += &(&coeff * &two_co);
        }
    }
    let target = g25_principal_part();
    let mut keys: Vec<_> = lifted.keys().cloned().collect();
    keys.extend(target.keys().cloned());
    keys.sort();
    keys.dedup();
    let (mut worst, mut scale) = (0f64, 0f64);
    for key in keys {
        let a = target
            .get(&key)
            .map_or_else(|| HPComplex::zero(w), |v| HPComplex::from_real(Float::with_val(w, v)));
        let b = lifted.get(&key).cloned().unwrap_or_else(|| HPComplex::zero(w));
        worst = worst.max((&a - &b).abs().to_f64());
        scale = scale.max(a.abs().to_f64()).max(b.abs().to_f64());
    }
    let rel = if scale == 0.0 { worst } else { worst / scale };
    Ok((worst, rel, scale))
}

/// One named check of the standard battery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    MockTheta(i64),
    Eta25(u32),
    Zagier(i64),
    Duality(DualityInstance),
    Integrality(i64, i64),
}

impl Check {
    pub fn run(self, cfg: &RunConfig) -> Result<CheckReport> {
        match self {
            Check::MockTheta(delta) => cmd_mock_theta(delta, cfg),
            Check::Eta25(n) => cmd_eta25(n, cfg),
            Check::Zagier(d) => cmd_zagier(d, cfg),
            Check::Duality(i) => cmd_duality(i, cfg),
            Check::Integrality(d, h) => cmd_integrality(d, h, cfg),
        }
    }
}

/// The standard battery, in report order.
pub fn standard_battery() -> Vec<Check> {
    let mut checks: Vec<Check> = [-23, -47, -71, -95].into_iter().map(Check::MockTheta).collect();
    checks.extend([1, 2].map(Check::Eta25));
    checks.extend([3, 4, 7, 8, 11, 12, 15].map(Check::Zagier));
    checks.extend(
        [
            DualityInstance::MockTheta,
            DualityInstance::Eta25,
            DualityInstance::Empty,
        ]
        .map(Check::Duality),
    );
    checks.extend([(23, 1), (47, 1)].map(|(d, h)| Check::Integrality(d, h)));
    checks
}

/// Runs checks in parallel (up to the configured thread count), reporting in input order.
pub fn run_checks(checks: &[Check], cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    cfg.install(|| checks.par_iter().map(|c| c.run(cfg)).collect::<Result<Vec<_>>>())?
}

pub fn run_all(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    run_checks(&standard_battery(), cfg)
}

const CSV_HEADER: &str = "check,inputs,lhs,rhs,abs_residual,rel_residual,pass,prec_bits,c_max,wall_ms";

/// Renders reports in the requested format (JSON is a pretty-printed array).
pub fn render(reports: &[CheckReport], format: OutputFormat) -> Result<String> {
    let join_inputs = |r: &CheckReport| {
        r.inputs
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    };
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(reports)? + "\n",
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in reports {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.check,
                    join_inputs(r),
                    r.lhs,
                    r.rhs,
                    r.abs_residual,
                    r.rel_residual,
                    r.pass,
                    r.prec_bits,
                    r.c_max,
                    r.wall_ms
                );
            }
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            for r in reports {
                let _ = write!(
                    out,
                    "{} {} [{}] lhs={} rhs={} rel={}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.check,
                    join_inputs(r),
                    r.lhs,
                    r.rhs,
                    r.rel_residual
                );
                for (k, v) in &r.diagnostics {
                    let _ = write!(out, " {k}={v}");
                }
                out.push('\n');
            }
            out
        }
    })
}

trait PowI {
    fn pow_i(self, e: u32) -> Float;
}

impl PowI for Float {
    fn pow_i(self, e: u32) -> Float {
        let mut acc = Float::with_val(self.prec(), 1);
        for _ in 0..e {
            acc *= &self;
        }
        acc
    }
}
