//! Random algebraic constructions of dense apex-free partite hypergraphs
//! over finite fields, together with the supporting machinery: exact
//! arithmetic in GF(p) and small extensions, homogeneous polynomial spaces,
//! projective enumeration, Hilbert functions, regular-sequence certification,
//! parameter schedules, and brute-force verification oracles.
//!
//! Everything is deterministic: randomness is drawn from a seeded ChaCha8
//! stream and every construction run can be replayed bit-exactly from its
//! certificate.

pub mod certificate;
pub mod construct;
pub mod geometry;
pub mod gf;
pub mod hypergraph;
pub mod linalg;
pub mod poly;
pub mod regseq;
pub mod rng;
pub mod schedule;

pub use gf::{FieldElement, FieldParams};
pub use poly::{HomogPoly, MonomialBasis, MultiHomogPoly};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element not valid under the given field parameters: {0}")]
    FieldMismatch(String),
    #[error("zero vector has no projective representative")]
    ZeroVector,
    #[error("inversion of zero in GF({p}^{e})")]
    DivisionByZero { p: u64, e: usize },
    #[error("budget exceeded in {stage}: {detail}")]
    BudgetExceeded { stage: String, detail: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn budget(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::BudgetExceeded {
            stage: stage.into(),
            detail: detail.into(),
        }
    }
}
