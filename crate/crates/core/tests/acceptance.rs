//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use cmtrace::modeval::{e4_series, eta_series, j_invariant};
use cmtrace::numkernel::arith::{egcd, gcd, kronecker};
use cmtrace::numkernel::pi;
use cmtrace::poincare::{eval_poincare, eval_poincare_rows, plan_rows, PoincareSpec};
use cmtrace::quadforms::{
    enumerate_classes, enumerate_classes_with_bound, genus_char, genus_char_gkz, Mat2, QuadForm, SignMode, TwistParams,
};
use cmtrace::verify::{self, Check, CheckReport, DualityInstance, OutputFormat, RunConfig};
use cmtrace::{HPComplex, PrecCtx};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rug::Float;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn cfg(prec: Option<u32>) -> RunConfig {
    RunConfig {
        prec_bits: prec,
        timing: false,
        ..RunConfig::default()
    }
}

fn run(checks: &[Check], cfg: &RunConfig) -> Vec<CheckReport> {
    verify::run_checks(checks, cfg).expect("checks run")
}

fn summary(r: &CheckReport) -> String {
    let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{}[{}] lhs={} rel={}", r.check, inputs.join(","), r.lhs, r.rel_residual)
}

fn mock_theta() -> Outcome {
    let deltas = [-23, -47, -71, -95];
    let expected = ["1", "-2", "3", "-3"];
    let mut ok = true;
    let mut notes = Vec::new();
    for (delta, want) in deltas.into_iter().zip(expected) {
        let t = Instant::now();
        let r = &run(&[Check::MockTheta(delta)], &cfg(Some(128)))[0];
        let secs = t.elapsed().as_secs_f64();
        ok &= r.pass && r.rel_residual() < 1e-10 && r.lhs == want && secs < 60.0;
        notes.push(format!("{} {secs:.1}s", summary(r)));
    }
    (ok, notes.join("; "))
}

fn eta25() -> Outcome {
    let reports = run(&[Check::Eta25(1), Check::Eta25(2)], &cfg(Some(256)));
    let lhs_ok = reports[0].lhs == "350" && reports[1].lhs == "3575";
    let pass = reports.iter().all(|r| r.pass && r.rel_residual() < 1e-6);
    let ratio = |r: &CheckReport| r.diagnostics["ratio"].parse::<f64>().unwrap();
    let (r1, r2) = (ratio(&reports[0]), ratio(&reports[1]));
    let ratio_const = ((r1 - r2) / r1).abs() < 1e-6;
    let mut notes: Vec<String> = reports
        .iter()
        .map(|r| format!("{} rel_derived={}", summary(r), r.diagnostics["rel_residual_derived"]))
        .collect();
    notes.push(format!("ratio n=1 {r1:.12e} n=2 {r2:.12e} constant={ratio_const}"));
    notes.push(format!("printed ratio {}", reports[0].diagnostics["ratio_printed"]));
    (lhs_ok && pass && ratio_const, notes.join("; "))
}

fn zagier() -> Outcome {
    let ds = [3, 4, 7, 8, 11, 12, 15];
    let reports = run(&ds.map(Check::Zagier), &cfg(Some(128)));
    let mut ok = reports[0].lhs == "-248" && reports[1].lhs == "492";
    let tol = 2f64.powi(-64);
    for r in &reports {
        ok &= r.pass && r.abs_residual() < tol;
    }
    let values: Vec<String> = reports.iter().map(|r| format!("{}:{}", r.inputs["d"], r.lhs)).collect();
    let worst = reports.iter().map(|r| r.abs_residual()).fold(0.0, f64::max);
    (ok, format!("{} max distance {worst:.3e}", values.join(" ")))
}

fn duality() -> Outcome {
    let reports = run(
        &[
            DualityInstance::MockTheta,
            DualityInstance::Eta25,
            DualityInstance::Empty,
        ]
        .map(Check::Duality),
        &cfg(None),
    );
    let ok = reports[..2].iter().all(|r| r.pass && r.rel_residual() < 1e-8) && reports[2].abs_residual() == 0.0;
    (ok, reports.iter().map(summary).collect::<Vec<_>>().join("; "))
}

// ---- property suite helpers ----

fn pt(x: f64, y: f64, prec: u32) -> HPComplex {
    HPComplex::new(Float::with_val(prec, x), Float::with_val(prec, y))
}

fn rel(a: &HPComplex, b: &HPComplex) -> f64 {
    ((a - b).abs() / b.abs()).to_f64()
}

/// Random element of Γ₀(n) with lower row `(n·c0, d)`, shifted by `T^t`.
fn gamma0(rng: &mut StdRng, n: i64) -> Mat2 {
    loop {
        let c = n * rng.gen_range(1..=2i64);
        let d = rng.gen_range(-7..=7i64);
        if gcd(c, d) != 1 {
            continue;
        }
        let (_, x, y) = egcd(d, c);
        let g = Mat2::new(x, -y, c, d);
        assert_eq!(g.det(), 1);
        return Mat2::translation(rng.gen_range(-2..=2)).mul(&g);
    }
}

fn poincare_modularity(rng: &mut StdRng) -> Outcome {
    let ctx = PrecCtx::new(128);
    let spec = PoincareSpec::new(1, 5.0, -2, 6).with_term_floor(1e-12);
    let floor = 2f64.powi(-(ctx.prec_bits as i32) + 16);
    let mut worst = 0f64;
    for _ in 0..20 {
        let g = gamma0(rng, 6);
        let z = pt(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..1.2), ctx.working());
        let a = eval_poincare(&spec, &z, &ctx).unwrap();
        let b = eval_poincare(&spec, &g.act(&z), &ctx).unwrap();
        let j = g.cocycle(&z);
        let resid = (&(&b.value * &j.powi(2)) - &a.value).abs().to_f64();
        let bound = floor.max(10.0 * (a.trunc_estimate + b.trunc_estimate * j.norm_sqr().to_f64()));
        if resid >= bound {
            return (false, format!("modularity residual {resid:e} >= {bound:e}"));
        }
        worst = worst.max(resid / bound);
    }
    (true, format!("modularity worst residual/bound {worst:.2e}"))
}

struct Stencil {
    f: HPComplex,
    fx: HPComplex,
    fy: HPComplex,
    fxx: HPComplex,
    fyy: HPComplex,
}

fn stencil(f: impl Fn(&HPComplex) -> HPComplex, z: &HPComplex) -> Stencil {
    let p = z.prec();
    let h: Float = Float::with_val(p, 1) >> 30i32;
    let at = |dx: i32, dy: i32| {
        let mut w = z.clone();
        w.re += Float::with_val(p, &h * dx);
        w.im += Float::with_val(p, &h * dy);
        f(&w)
    };
    let f0 = f(z);
    let d1 = |v: [HPComplex; 4]| {
        (&(&(&v[0] - &v[3]) + &v[2].scale_i64(8)) - &v[1].scale_i64(8)).scale(&Float::with_val(p, &h * 12u32).recip())
    };
    let d2 = |v: [HPComplex; 4]| {
        let num = &(&(&v[1].scale_i64(16) + &v[2].scale_i64(16)) - &(&v[0] + &v[3])) - &f0.scale_i64(30);
        num.scale(&Float::with_val(p, h.clone().square() * 12u32).recip())
    };
    let xs = || [at(-2, 0), at(-1, 0), at(1, 0), at(2, 0)];
    let ys = || [at(0, -2), at(0, -1), at(0, 1), at(0, 2)];
    let (xv, yv) = (xs(), ys());
    Stencil {
        fx: d1(xv.clone()),
        fxx: d2(xv),
        fy: d1(yv.clone()),
        fyy: d2(yv),
        f: f0.clone(),
    }
}

fn eigen_and_ladder() -> Outcome {
    let ctx = PrecCtx::new(256);
    let w = ctx.working();
    let mut worst = 0f64;
    let fixed =
        |spec: &PoincareSpec, z: &HPComplex| plan_rows(&spec.clone().with_term_floor(1e-4), z, &ctx).unwrap().rows;

    // Δ_k F = (s(1-s) + (k²-2k)/4) F
    let z = pt(-0.07, 0.91, w);
    for (s, k) in [(2.5, -2i64), (3.5, 2)] {
        let spec = PoincareSpec::new(1, s, k, 6);
        let rows = fixed(&spec, &z);
        let st = stencil(|v| eval_poincare_rows(&spec, v, &rows, &ctx).unwrap(), &z);
        let y2 = Float::with_val(w, z.im.square_ref());
        let lap = &(&st.fxx + &st.fyy).scale(&(-y2))
            + &(&st.fx + &st.fy.mul_i()).mul_i().scale(&Float::with_val(w, &z.im * k));
        let lambda = s * (1.0 - s) + (k * k - 2 * k) as f64 / 4.0;
        worst = worst.max(rel(&lap, &st.f.scale(&Float::with_val(w, lambda))));
    }
    // R_k F(·,s,k) = 4πm (s + k/2) F(·,s,k+2);  L_k F(·,s,k) = (s - k/2)/(4πm) F(·,s,k-2)
    let z = pt(0.19, 1.02, w);
    let (m, s) = (2u64, 3.0);
    for k in [-2i64, 0] {
        let spec = PoincareSpec::new(m, s, k, 6);
        let rows = fixed(&spec, &z);
        let st = stencil(|v| eval_poincare_rows(&spec, v, &rows, &ctx).unwrap(), &z);
        let four_pi_m = pi(w) * 4u32 * m;
        let raised = &(&st.fx.mul_i() + &st.fy) + &st.f.scale(&Float::with_val(w, k as f64 / &z.im));
        let up = eval_poincare_rows(&PoincareSpec::new(m, s, k + 2, 6), &z, &rows, &ctx).unwrap();
        worst = worst.max(rel(
            &raised,
            &up.scale(&Float::with_val(w, &four_pi_m * (s + k as f64 / 2.0))),
        ));
        let y2 = Float::with_val(w, z.im.square_ref());
        let lowered = (&(-st.fx.mul_i()) + &st.fy).scale(&y2);
        let down = eval_poincare_rows(&PoincareSpec::new(m, s, k - 2, 6), &z, &rows, &ctx).unwrap();
        worst = worst.max(rel(
            &lowered,
            &down.scale(&(Float::with_val(w, s - k as f64 / 2.0) / &four_pi_m)),
        ));
    }
    (
        worst < 1e-6,
        format!("eigenvalue/raising/lowering worst rel {worst:.2e}"),
    )
}

fn modular_functions() -> Outcome {
    let ctx = PrecCtx::new(128);
    let w = ctx.working();
    let tol = 2f64.powi(-(ctx.prec_bits as i32) + 16);
    let mut worst = 0f64;
    for (x, y) in [(0.3, 1.2), (-0.41, 0.95), (0.05, 1.6)] {
        let z = pt(x, y, w);
        let sz = &HPComplex::from_i64(w, -1, 0) / &z;
        // η(-1/z) = √(-iz) η(z)
        let lhs = eta_series(&sz, &ctx);
        let rhs = &(-z.mul_i()).sqrt() * &eta_series(&z, &ctx);
        worst = worst.max(rel(&lhs, &rhs));
        // E₄(-1/z) = z⁴ E₄(z)
        let lhs = e4_series(&sz, &ctx);
        let rhs = &z.powi(4) * &e4_series(&z, &ctx);
        worst = worst.max(rel(&lhs, &rhs));
    }
    let ji = j_invariant(&HPComplex::i(w), &ctx);
    let err_i = (&ji - &HPComplex::from_i64(w, 1728, 0)).abs().to_f64() / 1728.0;
    let rho = HPComplex::new(Float::with_val(w, -0.5), Float::with_val(w, 3).sqrt() / 2u32);
    let err_rho = j_invariant(&rho, &ctx).abs().to_f64();
    let ok = worst < tol && err_i < tol && err_rho < tol;
    (
        ok,
        format!("eta/E4 worst rel {worst:.2e}, j(i) {err_i:.2e}, j(rho) {err_rho:.2e}"),
    )
}

/// (Δ, r, N, d, h) whose class sets feed the genus character checks.
const GENUS_CASES: &[(i64, i64, i64, i64, i64)] = &[
    (-23, 1, 6, 1, 1),
    (-23, 1, 6, 1, 5),
    (-47, 1, 6, 1, 11),
    (-71, 1, 6, 1, 7),
    (-95, 1, 6, 1, 1),
    (5, 1, 1, 3, 1),
    (-4, 0, 1, 5, 1),
    (12, 0, 1, 7, 1),
    (73, 1, 6, 23, 1),
];

fn genus(rng: &mut StdRng) -> Outcome {
    let sets: Vec<(TwistParams, i64, Vec<QuadForm>)> = GENUS_CASES
        .iter()
        .map(|&(delta, r, n, d, h)| {
            let tw = TwistParams::new(delta, r, n).unwrap();
            let set = enumerate_classes(d * delta.abs(), r * h, n, SignMode::Both).unwrap();
            (tw, n, set.reps.iter().map(|c| c.form()).collect())
        })
        .collect();
    for _ in 0..200 {
        let (tw, n, forms) = &sets[rng.gen_range(0..sets.len())];
        let q = forms[rng.gen_range(0..forms.len())].act(&gamma0(rng, *n));
        let chi = genus_char(&q, tw, *n).unwrap();
        if chi != genus_char_gkz(&q, tw, *n) {
            return (false, format!("direct vs GKZ disagree at {q}"));
        }
        let q2 = q.act(&gamma0(rng, *n));
        if genus_char(&q2, tw, *n).unwrap() != chi {
            return (false, format!("not Γ₀(N)-invariant at {q}"));
        }
        if chi != 0 {
            let mut vals: Vec<i32> = (-8i64..=8)
                .flat_map(|x| (-8i64..=8).map(move |y| (x, y)))
                .map(|(x, y)| q.value(x, y))
                .filter(|&v| v != 0 && gcd(v, tw.delta) == 1)
                .map(|v| kronecker(tw.delta, v))
                .collect();
            vals.sort();
            vals.dedup();
            if vals != [chi] {
                return (false, format!("character not well defined at {q}: {vals:?}"));
            }
        }
    }
    (true, "genus character on 200 random forms".into())
}

fn reduced_form_count(d: i64) -> usize {
    let mut count = 0;
    let mut a = 1;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            if (b * b + d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + d) / (4 * a);
            if c > a || (c == a && b >= 0) {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

fn class_sets() -> Outcome {
    let mut pairs: Vec<(i64, i64, i64)> = Vec::new();
    for d in [23, 47, 71, 95] {
        pairs.extend([1, 5, 7, 11].map(|h| (d, h, 6)));
    }
    pairs.extend([(23, 1, 6), (47, 1, 6)]);
    pairs.extend([3, 4, 7, 8, 11, 12, 15].map(|d| (d, d % 2, 1)));
    for (d, rho, n) in pairs {
        let a_max = n * (d + 4);
        let once = enumerate_classes_with_bound(d, rho, n, SignMode::PositiveOnly, a_max).unwrap();
        let twice = enumerate_classes_with_bound(d, rho, n, SignMode::PositiveOnly, 2 * a_max).unwrap();
        let want = reduced_form_count(d);
        if once.len() != twice.len() || once.len() != want {
            return (
                false,
                format!("D={d} rho={rho} N={n}: {} / {} vs {want}", once.len(), twice.len()),
            );
        }
    }
    (true, "class sets stable and match reduced-form counts".into())
}

fn integrality() -> Outcome {
    let reports = run(&[Check::Integrality(23, 1), Check::Integrality(47, 1)], &cfg(Some(128)));
    let tol = 2f64.powi(-64);
    let ok = reports.iter().all(|r| r.pass && r.abs_residual() < tol);
    (
        ok,
        format!(
            "integrality shadow: {}",
            reports.iter().map(summary).collect::<Vec<_>>().join("; ")
        ),
    )
}

fn property_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let parts = [
        poincare_modularity(&mut rng),
        eigen_and_ladder(),
        modular_functions(),
        genus(&mut rng),
        class_sets(),
        integrality(),
    ];
    let ok = parts.iter().all(|p| p.0);
    let notes: Vec<String> = parts
        .iter()
        .map(|(p, s)| format!("{}{s}", if *p { "" } else { "FAILED " }))
        .collect();
    (ok, notes.join("; "))
}

fn determinism() -> Outcome {
    let checks = [-23, -47, -71, -95].map(Check::MockTheta);
    let render = |threads: usize| {
        let cfg = RunConfig {
            threads: Some(threads),
            ..cfg(Some(128))
        };
        verify::render(&run(&checks, &cfg), OutputFormat::Json).unwrap()
    };
    let a = render(8);
    let b = render(8);
    let c = render(1);
    let ok = a == b && a == c;
    (
        ok,
        format!("two runs identical {}, 1 vs 8 threads identical {}", a == b, a == c),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("mock theta identity", mock_theta),
        ("eta25 identity", eta25),
        ("singular moduli traces", zagier),
        ("duality residuals", duality),
        ("property suite", property_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = f();
        failed += usize::from(!ok);
        println!(
            "criterion {} {} ({name}, {:.1}s): {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
