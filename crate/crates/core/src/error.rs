use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unknown client id {0}")]
    UnknownClient(usize),

    #[error("unknown vehicle slot (type {vtype}, index {index})")]
    UnknownSlot { vtype: usize, index: usize },

    #[error("instance has {clients} clients, search limit is {limit}")]
    InstanceTooLarge { clients: usize, limit: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("search limit reached before any feasible solution: {0}")]
    SearchLimit(String),

    #[error("client {0} cannot be served by any vehicle type")]
    InfeasibleClient(usize),

    #[error("big-M value {0} exceeds the exactly representable range of the model format")]
    BigMOverflow(f64),

    #[error("model text, line {line}: {message}")]
    ModelParse { line: usize, message: String },

    #[error("subtour detected on slot {slot}: cycle {cycle:?}")]
    SubtourDetected { slot: usize, cycle: Vec<usize> },

    #[error("binary variable {name} has fractional value {value}")]
    FractionalBinary { name: String, value: f64 },

    #[error("malformed solution assignment: {0}")]
    Assignment(String),

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("matrix file: {0}")]
    Matrix(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateInput(_) => "degenerate_input",
            Error::UnknownClient(_) => "unknown_client",
            Error::UnknownSlot { .. } => "unknown_slot",
            Error::InstanceTooLarge { .. } => "instance_too_large",
            Error::Infeasible(_) => "infeasible",
            Error::SearchLimit(_) => "search_limit",
            Error::InfeasibleClient(_) => "infeasible_client",
            Error::BigMOverflow(_) => "big_m_overflow",
            Error::ModelParse { .. } => "model_parse",
            Error::SubtourDetected { .. } => "subtour_detected",
            Error::FractionalBinary { .. } => "fractional_binary",
            Error::Assignment(_) => "assignment",
            Error::Schema { .. } => "schema",
            Error::Matrix(_) => "matrix",
            Error::Io { .. } => "io",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
