use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("vertex {id}: {reason}")]
    BadVertex { id: i64, reason: String },

    #[error("edge #{index} ({u}, {v}): {reason}")]
    BadEdge {
        index: usize,
        u: i64,
        v: i64,
        reason: String,
    },

    #[error("matrix entry ({i}, {j}): {reason}")]
    BadMatrix { i: i64, j: i64, reason: String },

    #[error("triangle inequality fails on ({a}, {b}, {c}): d(a,b) = {dab} > d(a,c) + d(c,b) = {via}")]
    Triangle {
        a: i64,
        b: i64,
        c: i64,
        dab: f64,
        via: f64,
    },

    #[error("vertex {0} is unreachable from the first vertex")]
    Disconnected(i64),

    #[error("unknown vertex id {0}")]
    UnknownVertex(i64),

    #[error("exact adversary refused: {candidates} candidate vertices exceed the exhaustion limit {limit}")]
    ExhaustionLimit { candidates: usize, limit: usize },

    #[error("iteration cap {cap} reached with {open_gaps} gaps above resolution")]
    IterationCap { cap: usize, open_gaps: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("fragment: {0}")]
    Fragment(String),

    #[error("connectivity query refuted during gap filling between {x} and {y}")]
    Refuted { x: i64, y: i64 },

    #[error("schema: {0}")]
    Schema(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}
