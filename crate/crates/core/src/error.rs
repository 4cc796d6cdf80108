use std::io;

use crate::normalizers::Linearity;

/// Errors produced by ingestion, normalization, classification and the
/// aggregation guard.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: duplicate paper_id `{id}`")]
    DuplicateId { id: String, line: u64 },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("unknown reference cell `{0}`")]
    UnknownCell(String),

    #[error("unknown paper `{0}`")]
    UnknownPaper(String),

    #[error("{method}: division undefined in cell `{cell}` ({what} is zero)")]
    DivisionUndefined { method: &'static str, cell: String, what: &'static str },

    #[error("{method}: cell `{cell}` is constant, standardization undefined")]
    ConstantCell { method: &'static str, cell: String },

    #[error("{method}: cell `{cell}` has a single distinct citation value, scaling term is unidentifiable")]
    DegenerateCell { method: &'static str, cell: String },

    #[error("reference distribution is empty")]
    EmptyReference,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("benchmark papers all share one FCR value, regression slope is unidentifiable")]
    UnidentifiableSlope,

    #[error("paper `{paper_id}`: expected citation rate {ecr} is not positive")]
    NonPositiveEcr { paper_id: String, ecr: f64 },

    #[error("paper `{paper_id}`: pooled mean of quantile interval {interval} is zero, exchange rate undefined")]
    UndefinedExchangeRate { paper_id: String, interval: usize },

    #[error("cell `{cell}`: no usable exchange rate in intervals [{pi_m}, {pi_max}]")]
    NoDefinedRate { cell: String, pi_m: usize, pi_max: usize },

    #[error("mapping is constant (zero scaling term), not a linear transformation")]
    ConstantMap,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("refused: `{method}` scores are {linearity}; {reason}")]
    Refused { method: String, linearity: String, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn refused(method: impl Into<String>, linearity: Linearity) -> Self {
        Error::Refused {
            method: method.into(),
            linearity: linearity.as_str().to_owned(),
            reason: "nonlinear normalized citation scores cannot be added or averaged".into(),
        }
    }

    /// True for aggregation-guard refusals.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refused { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
