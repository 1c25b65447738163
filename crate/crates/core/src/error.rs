use thiserror::Error;

use crate::graph::{EdgeId, VertexId};
use crate::poly::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge sets I and J must have equal size (got {0} and {1})")]
    SizeMismatch(usize, usize),
    #[error("edge {0} appears in K and in I or J")]
    KOverlap(EdgeId),
    #[error("edge {0} listed more than once")]
    RepeatedEdge(EdgeId),
    #[error("partition is invalid: {0}")]
    InvalidPartition(String),
    #[error("variable {var} has degree {degree}, expected at most 2")]
    DegreeExceeded { var: Var, degree: u32 },
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("polynomial division is not exact")]
    InexactDivision,
    #[error("need {needed} edges, graph has {have}")]
    TooFewEdges { needed: usize, have: usize },
    #[error("not a 3-vertex join: {0}")]
    NotThreeJoin(String),
    #[error("no double triangle found")]
    NoDoubleTriangle,
    #[error("not denominator reducible: {0}")]
    NotReducible(String),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(usize),
    #[error("graph has {0} edges; enumeration supports at most 64")]
    TooManyEdges(usize),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalogEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
