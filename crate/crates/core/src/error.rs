use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("points ({0}, {1}, {2}) are not strictly increasing below 13")]
    BadTriple(u8, u8, u8),
    #[error("triple rank {0} out of range")]
    RankOutOfRange(usize),
    #[error("point count {0} outside 3..=13")]
    BadPointCount(usize),
    #[error("point {point} out of range for a {n}-point hypergraph")]
    PointOutOfRange { point: usize, n: usize },
    #[error("cannot delete a point from a 3-point hypergraph")]
    TooFewPoints,
    #[error("malformed hypergraph encoding: {0}")]
    Encoding(String),
    #[error("candidate numbering does not match the base hypergraph: {0}")]
    NumberingMismatch(String),
    #[error("interval has {free} free candidates, above the cap of {cap}")]
    MemberCapExceeded { free: u32, cap: u32 },
    #[error("group closure exceeded {0} elements")]
    GroupCapExceeded(usize),
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("invalid path bounds: {0}")]
    BadBounds(String),
    #[error("seed is not R(4,4;3)-good")]
    SeedNotGood,
    #[error("malformed colouring: {0}")]
    Colouring(String),
    #[error("invalid omitted-edge configuration: {0}")]
    Omitted(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint belongs to a different run: {0}")]
    CheckpointMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
