use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is singular within tolerance (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("congruence residual {residual:e} exceeds limit {limit:e}")]
    CongruenceResidual { residual: f64, limit: f64 },

    #[error("assignment has {found} bits, encoding expects {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operation requires the {expected} encoding")]
    WrongEncoding { expected: &'static str },

    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),

    #[error("model was built without cost instrumentation")]
    InstrumentationDisabled,

    #[error("model has {qubits} qubits, exhaustive search is capped at {cap}")]
    SizeCap { qubits: usize, cap: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("K_{requested} exceeds the clique capacity {capacity} of this graph")]
    Capacity { requested: usize, capacity: usize },

    #[error(
        "could not place clique #{index} (K_{size}) with the triangle packer; \
         this does not prove the cliques are non-embeddable"
    )]
    Packing { index: usize, size: usize },

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
