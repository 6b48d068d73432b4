//! Exact computation in class groups of imaginary quadratic fields, plus the
//! congruence machinery that manufactures discriminants whose class group
//! contains an element of a prescribed order, and a screen for quadratic-twist
//! families of elliptic curves with rational p-torsion.
//!
//! Everything is exact integer arithmetic; the only floating point in the crate
//! is the diagnostic log-log slope fit in [`census`].

pub mod arith;
pub mod census;
pub mod construct;
pub mod frey;
pub mod qform;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside an operation's domain (bad modulus, composite where a
    /// prime is required, indefinite form, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Input exceeds the configured magnitude cap.
    #[error("size cap exceeded: {0}")]
    Size(String),
    /// A run would exceed the configured compute budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// No admissible lifted residue class admits a special witness.
    #[error("no special lift found for class {a} mod {b}")]
    NoSpecialLift { a: i64, b: u64 },
    /// A congruence system pinned the same prime to conflicting conditions.
    #[error("unsatisfiable congruence system at prime {prime}")]
    Unsatisfiable { prime: u64 },
    /// Curve label not present in the dataset.
    #[error("unknown curve label: {0}")]
    UnknownCurve(String),
    /// Malformed input file or flag value.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable process exit code for the CLI contract.
    ///
    /// 0 success, 1 negative-but-valid result, 2 usage/domain error, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Size(_) | Error::Budget(_) => 3,
            _ => 2,
        }
    }
}
