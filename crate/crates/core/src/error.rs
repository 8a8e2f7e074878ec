use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("value {value} outside 1..={bound}")]
    OutOfRange { value: usize, bound: usize },
    #[error("partition has {got} blocks, expected {expected}")]
    BlockCount { expected: usize, got: usize },
    #[error("orders are over different sets")]
    UnderlyingSetMismatch,
    #[error("subset is not contained in the ordered set")]
    NotASubset,
    #[error("element is not in the order")]
    ElementMissing,
    #[error("orders overlap")]
    Overlap,
    #[error("duplicate element in order")]
    Duplicate,
    #[error("node {node} out of range (graph has {count} nodes)")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("edge {edge} out of range (graph has {count} edges)")]
    EdgeOutOfRange { edge: usize, count: usize },
    #[error("graph is cyclic")]
    Cyclic,
    #[error("nodes must be distinct")]
    SameNode,
    #[error("no common inner edges between the nodes")]
    EmptyCie,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("valence mismatch: expected {expected}, found {found}")]
    ValenceMismatch { expected: String, found: String },
    #[error("insertion map does not match the inserted graphs: {0}")]
    BadInsertion(String),
    #[error("decomposition precondition failed: {0}")]
    Decompose(&'static str),
    #[error("marking violation: {0}")]
    Marking(String),
    #[error("hom-set at {0} is not finite or not available")]
    NotFinite(String),
    #[error("unknown colour {0}")]
    UnknownColour(String),
    #[error("operation not in this operad: {0}")]
    BadOperation(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
