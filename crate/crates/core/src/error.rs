use thiserror::Error;

use crate::jetexpr::JetVar;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown symbol `{name}` at byte {pos}")]
    UnknownSymbol { name: String, pos: usize },

    #[error("jet index on non-dependent variable `{name}` at byte {pos}")]
    JetOnNonDependent { name: String, pos: usize },

    #[error("parameter `{0}` is not bound in the assignment")]
    UnboundParameter(String),

    #[error("sigma must be assigned +1 or -1, got {0}")]
    SigmaNotUnit(String),

    #[error("jet {jet} exceeds the Euler operator order bound {max_order}")]
    OrderBound { jet: JetVar, max_order: u8 },

    #[error("normal-form reduction exceeded the order bound at {0}")]
    NormalFormDiverged(JetVar),

    #[error("expression is not solved for {0}: {1}")]
    NotSolvable(JetVar, String),

    #[error("scaling factor `{0}` must be nonzero")]
    ZeroScaling(&'static str),

    #[error("degenerate family: d*sigma must be nonzero")]
    Degenerate,

    #[error("ill-formed branch: {0}")]
    Branch(String),

    #[error("{0}")]
    Opaque(String),

    #[error("multiplier check failed: {0}")]
    NotAMultiplier(String),

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
