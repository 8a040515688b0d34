use thiserror::Error;

/// Errors surfaced by game construction, preprocessing and solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("game tree validation failed: {0}")]
    InvalidTree(String),
    #[error("decision problem validation failed: {0}")]
    InvalidTfsdp(String),
    #[error("infoset precedence is not a partial order; problem cannot be timed")]
    Untimeable,
    #[error("actions are not team-public; branching reduction does not apply")]
    NotTeamPublic,
    #[error("belief {0:?} mixes terminal and nonterminal nodes")]
    MixedTerminalBelief(Vec<usize>),
    #[error("input is not timed: infoset {0} spans layers")]
    NotTimed(usize),
    #[error("enumeration guard exceeded: more than {0} pure strategies")]
    TooLarge(u64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("strategy is not normalized")]
    Unnormalized,
    #[error("unknown prescription index {0} at node {1}")]
    BadPrescription(usize, usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
