use thiserror::Error;

use crate::grid::Point;
use crate::population::Label;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        point: Point,
        expected: usize,
        got: usize,
    },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid neighborhood: {0}")]
    InvalidNeighborhood(String),

    #[error("{connectivity}-connectivity is not defined in dimension {dim}")]
    UnsupportedConnectivity { dim: usize, connectivity: u32 },

    #[error("point {0} is not in the domain")]
    OutsideDomain(Point),

    #[error("point {0} is already labeled")]
    AlreadyLabeled(Point),

    #[error("unknown label {0}")]
    UnknownLabel(Label),

    #[error("pop on an empty queue (bucket {0})")]
    EmptyQueue(i64),

    #[error("seed `{0}` has no points")]
    EmptySeed(String),

    #[error("seed `{id}`: point {point} is not in the domain")]
    SeedOutsideDomain { id: String, point: Point },

    #[error("seed `{id}`: point {point} is also claimed by seed `{other}`")]
    OverlappingSeeds {
        id: String,
        other: String,
        point: Point,
    },

    #[error("seeds `{first}` and `{second}` are adjacent at {point}")]
    AdjacentSeeds {
        first: String,
        second: String,
        point: Point,
    },

    #[error("duplicate seed id `{0}`")]
    DuplicateSeedId(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("zone of influence mismatch at {point}: incremental {incremental:?}, recomputed {recomputed:?}")]
    ZiMismatch {
        point: Point,
        incremental: Vec<Label>,
        recomputed: Vec<Label>,
    },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
