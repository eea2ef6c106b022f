//! Error type shared by every module of the crate.

use thiserror::Error;

/// All failure modes of the library.
///
/// Each variant has a stable machine-readable kind string (see [`Error::kind`])
/// so that downstream tooling can dispatch on it without parsing messages.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// An operation cancelled away every significant digit, or an input did
    /// not carry enough digits for the requested computation.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("not a square: {0}")]
    NotSquare(String),

    /// Reduction of an element of negative valuation.
    #[error("not integral: valuation {valuation} < 0")]
    NotIntegral { valuation: i64 },

    #[error("operation requires region {expected}, parameters are in region {found}")]
    WrongRegion { expected: String, found: String },

    #[error("state budget exceeded: {states} states > budget {budget}")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("iteration did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: u64 },

    /// Neither square root of the operand lies in the requested residue disc.
    #[error("no square-root branch available: {0}")]
    BranchUnavailable(String),

    /// An iterate left the horseshoe box, certifying non-membership.
    #[error("point left the box at iterate {step}; not in the filled Julia set")]
    NotInJulia { step: i64 },

    /// A coordinate lies in neither open coding disc.
    #[error("iterate {step} lies in neither coding disc")]
    AmbiguousSector { step: i64 },

    /// The map has no 2-cycle over the ground field.
    #[error("the map has no 2-cycle over Q_p")]
    NoTwoCycle,

    /// A valuation left the representable range (typically a runaway escaping
    /// orbit whose norm squares every step).
    #[error("valuation overflow during iteration")]
    ValuationOverflow,

    /// Invalid input: malformed literal, bad prime, mismatched primes, ...
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable kind string, used for JSON payloads and exit-code mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NotSquare(_) => "NotSquare",
            Error::NotIntegral { .. } => "NotIntegral",
            Error::WrongRegion { .. } => "WrongRegion",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::BranchUnavailable(_) => "BranchUnavailable",
            Error::NotInJulia { .. } => "NotInJulia",
            Error::AmbiguousSector { .. } => "AmbiguousSector",
            Error::NoTwoCycle => "NoTwoCycle",
            Error::ValuationOverflow => "ValuationOverflow",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
