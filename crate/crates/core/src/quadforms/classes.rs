use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gamma0_equivalent, stabilizer_order, QuadForm};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    Both,
    PositiveOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRep {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub stab: usize,
}

impl ClassRep {
    pub fn form(&self) -> QuadForm {
        QuadForm::new(self.a, self.b, self.c)
    }
}

/// Γ₀(N)-classes of forms of discriminant `-D` with `N | a`, `b ≡ ρ (mod 2N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSet {
    #[serde(rename = "D")]
    pub d: i64,
    pub rho: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub sign_mode: SignMode,
    pub a_max: i64,
    pub reps: Vec<ClassRep>,
}

impl ClassSet {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Enumerates classes with the default bound `a_max = N(D + 4)` and checks the
/// class count is unchanged at `2·a_max`.
pub fn enumerate_classes(d: i64, rho: i64, n: i64, sign_mode: SignMode) -> Result<ClassSet> {
    let a_max = n * (d + 4);
    let set = enumerate_classes_with_bound(d, rho, n, sign_mode, a_max)?;
    let wider = enumerate_classes_with_bound(d, rho, n, sign_mode, 2 * a_max)?;
    if wider.len() != set.len() {
        return Err(Error::BoundUnstable {
            d,
            rho,
            n,
            before: set.len(),
            after: wider.len(),
        });
    }
    Ok(set)
}

/// Single enumeration pass up to `|a| ≤ a_max` (no stability check).
pub fn enumerate_classes_with_bound(d: i64, rho: i64, n: i64, sign_mode: SignMode, a_max: i64) -> Result<ClassSet> {
    if d <= 0 || n <= 0 {
        return Err(Error::InvalidInput(format!("need D > 0 and N > 0, got D={d}, N={n}")));
    }
    let rho = rho.rem_euclid(2 * n);
    if (rho * rho + d).rem_euclid(4 * n) != 0 {
        return Err(Error::InvalidInput(format!(
            "rho={rho} does not satisfy rho^2 = -{d} mod {}",
            4 * n
        )));
    }
    let signs: &[i64] = match sign_mode {
        SignMode::Both => &[1, -1],
        SignMode::PositiveOnly => &[1],
    };
    let a_values: Vec<i64> = signs
        .iter()
        .flat_map(|&s| (1..=a_max / n).map(move |k| s * k * n))
        .collect();
    // T-translation moves b by 2a and fixes b mod 2N, so b ∈ (-|a|, |a|] suffices.
    let mut candidates: Vec<QuadForm> = a_values
        .par_iter()
        .flat_map_iter(|&a| {
            let abs_a = a.abs();
            let start = -abs_a + 1 + (rho - (-abs_a + 1)).rem_euclid(2 * n);
            (start..=abs_a)
                .step_by(2 * n as usize)
                .filter(move |b| (b * b + d) % (4 * a) == 0)
                .map(move |b| QuadForm::new(a, b, (b * b + d) / (4 * a)))
        })
        .collect();
    candidates.sort_by_key(|q| (q.a.abs(), q.a < 0, q.b.rem_euclid(2 * n), q.c, q.b));

    let mut reps: Vec<ClassRep> = Vec::new();
    for q in candidates {
        let mut seen = false;
        for r in &reps {
            if gamma0_equivalent(&r.form(), &q, n)?.is_some() {
                seen = true;
                break;
            }
        }
        if !seen {
            reps.push(ClassRep {
                a: q.a,
                b: q.b,
                c: q.c,
                stab: stabilizer_order(&q, n),
            });
        }
    }
    Ok(ClassSet {
        d,
        rho,
        n,
        sign_mode,
        a_max,
        reps,
    })
}
