//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation error: {0}")]
    Invalid(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("could not generate connected graph after {0} attempts")]
    GenerationFailed(usize),
    #[error("diameter undefined for a single-vertex graph")]
    DiameterUndefined,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("scheme requires an unweighted graph")]
    RequiresUnweighted,
    #[error("empty input set at index {0}")]
    EmptySet(usize),
    #[error("coloring precondition violated: set {index} has {size} < {q} vertices")]
    SetTooSmall { index: usize, size: usize, q: usize },
    #[error("coloring failed after {0} attempts; increase the vicinity constant or the class slack")]
    ColoringFailed(usize),
    #[error("center growing did not converge within {0} rounds")]
    CentersDiverged(usize),
    #[error("input is not a tree: {0}")]
    NotATree(String),
    #[error("sequence construction overran its length cap: {0}")]
    SequenceOverflow(String),
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("destination {dest} not in the vicinity of {at}")]
    NotInVicinity { at: u32, dest: u32 },
    #[error("label belongs to a foreign tree (expected root {expected}, got {got})")]
    ForeignLabel { expected: u32, got: u32 },
    #[error("hop budget of {budget} exceeded routing {src} -> {dst}: routing loop")]
    RoutingLoop { src: u32, dst: u32, budget: usize },
    #[error("protocol error at vertex {at}: {msg}")]
    Protocol { at: u32, msg: String },
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error("bad magic or version")]
    BadHeader,
    #[error("truncated or corrupt blob: {0}")]
    Corrupt(String),
    #[error("instance was built for a different graph (digest mismatch)")]
    GraphMismatch,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
