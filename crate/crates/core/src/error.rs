//! Error type shared by all modules of the library.

use thiserror::Error;

/// Errors surfaced by library operations.
///
/// Every fallible operation returns a named error; size-capped oracles in
/// particular never degrade into silently wrong answers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("edge ({0}, {1}) does not join the two colour classes")]
    NotBipartite(usize, usize),
    #[error("vertex index {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("the given edge set is not a perfect matching: {0}")]
    NotPerfectMatching(String),
    #[error("vertex {0} has degree {1}, bicontraction requires degree exactly 2")]
    DegreeNotTwo(usize, usize),
    #[error("endpoint colour classes do not admit the requested alternating path kind")]
    ColourMismatch,
    #[error("graph is not matching covered")]
    NotMatchingCovered,
    #[error("graph is not connected")]
    NotConnected,
    #[error("digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("oracle-too-large: instance has {size} vertices, cap is {cap}")]
    OracleTooLarge { size: usize, cap: usize },
    #[error("graph has too few vertices for the requested operation: {0}")]
    TooSmall(String),
    #[error("vertex set is not a tight cut shore: {0}")]
    NotTight(String),
    #[error("not J-bound: no union of elementary components yields a matching covered base containing the subgraph")]
    NotJBound,
    #[error("no brace of the input hosts the given expansion")]
    NoHostBrace,
    #[error("input is not a J-expansion: {0}")]
    NotAnExpansion(String),
    #[error("cycle is not conformal")]
    CycleNotConformal,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("wall too small: {0}")]
    WallTooSmall(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconclusive at configured caps: {0}")]
    InconclusiveAtCaps(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
