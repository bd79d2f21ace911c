use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series did not converge: {0}")]
    NonConvergent(String),
    #[error("inexact division in exact recurrence at index {index}")]
    InexactDivision { index: usize },
    #[error("non-integral coefficient at q^{exponent}: {value}")]
    NonIntegralCoefficient { exponent: i64, value: String },
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscMismatch(i64, i64),
    #[error("class enumeration unstable under bound doubling (D={d}, rho={rho}, N={n}): {before} vs {after} classes")]
    BoundUnstable {
        d: i64,
        rho: i64,
        n: i64,
        before: usize,
        after: usize,
    },
    #[error("no represented value coprime to {delta} found for form {form}")]
    NoRepresentativeFound { form: String, delta: i64 },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("invalid discriminant {0}: {1}")]
    InvalidDiscriminant(i64, String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
