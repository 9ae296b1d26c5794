use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),
    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),
    #[error("pulse kind {0} has no two-level block form")]
    NoBlockForm(&'static str),
    #[error("pulse {index} addresses ion {ion} but the schedule has {ion_count} ions")]
    IonOutOfRange {
        index: usize,
        ion: usize,
        ion_count: usize,
    },
    #[error("no duration known for target unitary `{0}`")]
    MissingDuration(String),
    #[error("unknown unitary label `{0}`")]
    UnknownLabel(String),
    #[error("matrix for `{0}` is not unitary")]
    NotUnitary(String),
    #[error("control string must be non-empty")]
    EmptyControls,
    #[error("invalid control string `{0}`")]
    InvalidControls(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {dim} exceeds the limit of {limit}")]
    DimensionOverflow { dim: usize, limit: usize },
    #[error("controls must be all ones before lowering (got `{0}`)")]
    ZeroControlsPresent(String),
    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
