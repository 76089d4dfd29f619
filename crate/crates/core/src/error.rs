use thiserror::Error;

use crate::graph::Edge;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("graph is not a tree")]
    NotATree,

    #[error("vertex {0} is not a leaf")]
    NotALeaf(usize),

    #[error("leaf edge {0} has r >= 1; the reduction would divide by a non-positive number")]
    DivisionByZeroGuard(Edge),

    #[error("{what} exceeds the limit of {limit} (got {actual})")]
    SizeLimit {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial has no real root")]
    NoRealRoot,

    #[error("the densities already ensure the transversal")]
    AlreadyEnsured,

    #[error("labeling is not proper: {0}")]
    ImproperLabeling(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("{0} is not an edge of the pattern graph")]
    NotAnHEdge(Edge),

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("bad split: {0}")]
    BadSplit(String),

    #[error("vertex {0} is not in the graph")]
    VertexNotInGraph(usize),

    #[error("invalid blow-up graph: {0}")]
    InvalidBlowup(String),

    #[error("search budget of {0} node expansions exhausted")]
    BudgetExhausted(u64),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
