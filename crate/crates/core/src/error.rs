use thiserror::Error;

use crate::table::VarId;

pub type Result<T> = std::result::Result<T, Error>;

/// Location-carrying syntax error from the model parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("variable {var:?} is not in the table domain")]
    NotInDomain { var: VarId },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("undefined division: {numerator} / 0")]
    UndefinedDivision { numerator: f64 },

    #[error("maximization over an empty set of states")]
    EmptyMax,

    #[error("decisions {0:?} and {1:?} share a temporal rank")]
    DecisionTie(VarId, VarId),

    #[error("invalid elimination order: {0}")]
    InvalidOrder(String),

    #[error("clique index {index} assigned to more than one clique")]
    DuplicateCliqueIndex { index: usize },

    #[error("no earlier clique contains the separator of clique {index}")]
    NoContainer { index: usize },

    #[error("no clique contains the domain of {0}")]
    NoHostClique(String),

    #[error(
        "probability potential is not constant in decision {decision:?} (relative spread {spread:e})"
    )]
    NotConstantInDecision { decision: VarId, spread: f64 },

    #[error("decision {0:?} was never max-marginalized")]
    MissingPolicy(VarId),

    #[error("total probability mass is {0}, expected 1")]
    Normalization(f64),

    #[error("state space of {cells} cells exceeds the cap of {cap}")]
    CapExceeded { cells: u128, cap: u128 },

    #[error("strong junction tree check failed: {0}")]
    NotStrong(String),

    #[error("solver state: {0}")]
    State(String),
}
