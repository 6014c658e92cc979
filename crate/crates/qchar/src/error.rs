use thiserror::Error;

use crate::monomial::Monomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
    /// 1-based line number when parsing multi-line input.
    pub line: Option<usize>,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
            line: None,
        }
    }

    pub fn at_line(mut self, line: usize) -> Self {
        if self.line.is_none() {
            self.message = format!("line {line}: {}", self.message);
            self.line = Some(line);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: String, rank: usize },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("node {node} out of range 1..={rank}")]
    NodeOutOfRange { node: usize, rank: usize },
    #[error("quantized Cartan matrix is not invertible")]
    NotInvertible,
    #[error("subdiagram {0:?} is not of finite type")]
    NotFiniteType(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgoError {
    #[error("InconsistentAlgorithm: monomial {monomial} gets different values {values:?} from nodes {nodes:?}")]
    InconsistentAlgorithm {
        monomial: Monomial,
        nodes: Vec<usize>,
        values: Vec<String>,
    },
    #[error("BudgetExceeded: more than {limit} terms")]
    BudgetExceeded { limit: usize },
    #[error("NonzeroResidue: {remaining} terms remain, e.g. {witness}")]
    NonzeroResidue { remaining: usize, witness: Monomial },
    #[error("NotDominant: {monomial} is not dominant on nodes {nodes:?}")]
    NotDominant {
        monomial: Monomial,
        nodes: Vec<usize>,
    },
    #[error("HeightLimitRequired: affine families need an explicit max height")]
    HeightLimitRequired,
    #[error("IncomparableTerm: {0} is not below the head")]
    IncomparableTerm(Monomial),
    #[error("PreconditionFailed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Cartan(#[from] CartanError),
}
