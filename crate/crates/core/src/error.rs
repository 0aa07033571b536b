use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,

    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),

    #[error("invalid edge weight {weight} on ({u}, {v}): weights must be positive and finite")]
    InvalidWeight { u: u64, v: u64, weight: f64 },

    #[error("invalid vertex weight {weight} on vertex {vertex}")]
    InvalidVertexWeight { vertex: usize, weight: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("no flow: graph has no edges")]
    NoFlow,

    #[error("module {0} is empty")]
    EmptyModule(usize),

    #[error("assignment covers {got} vertices, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("vertex {0} has no parent cluster")]
    UnmappedVertex(usize),

    #[error("non-finite coordinate at vertex {0}")]
    NonFiniteCoordinate(usize),

    #[error("vertices {0} and {1} share a position; jitter the layout first")]
    CoincidentPoints(usize, usize),

    #[error("undefined improvement: baseline quality is zero")]
    UndefinedImprovement,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad input data rather than a fault in the
    /// library.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyGraph
                | Error::InvalidWeight { .. }
                | Error::InvalidVertexWeight { .. }
                | Error::Parse { .. }
                | Error::UnsupportedFormat(_)
                | Error::SizeMismatch { .. }
                | Error::InvalidParameter(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
