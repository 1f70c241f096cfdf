use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("gap of {missing} samples between {from} and {to} exceeds maximum of {max}")]
    Gap {
        from: String,
        to: String,
        missing: usize,
        max: usize,
    },

    #[error("timestamps not strictly increasing at line {line}")]
    NonMonotone { line: usize },

    #[error("window {edge} edge out of bounds: {detail}")]
    Bounds { edge: &'static str, detail: String },

    #[error("insufficient history: need {required} samples, have {available}")]
    InsufficientHistory { required: usize, available: usize },

    #[error("degenerate window of {0} samples (need at least 2)")]
    DegenerateWindow(usize),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("no valid forecast points ({0})")]
    EmptyRun(String),

    #[error("volatility forecast requires a causal mean")]
    Acausal,

    #[error("empty series")]
    EmptySeries,
}

impl Error {
    /// True when the failure is caused by too little data rather than by bad
    /// input or parameters.
    pub fn is_data_insufficiency(&self) -> bool {
        matches!(
            self,
            Error::InsufficientHistory { .. } | Error::EmptyRun(_)
        )
    }
}
