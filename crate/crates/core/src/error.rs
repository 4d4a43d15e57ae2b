use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the optimizers, the benchmark suite and the harness.
#[derive(Debug, Error)]
pub enum CroError {
    #[error("objective returned a non-finite value ({value}) at evaluation {evaluation}")]
    NonFiniteObjective { value: f64, evaluation: u64 },

    #[error(
        "evaluation budget exhausted: {needed} evaluation(s) requested, {remaining} remaining"
    )]
    BudgetExhausted { needed: u64, remaining: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("a two-molecule reaction needs two distinct molecules (got index {0} twice)")]
    SameMolecule(usize),

    #[error("population too small for synthesis: {0} molecule(s)")]
    PopulationTooSmall(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("energy ledger violated: expected total {expected}, found {actual}")]
    EnergyLedger { expected: f64, actual: f64 },

    #[error("unknown benchmark id `{0}` (expected f1..f24)")]
    UnknownBenchmark(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("checksum mismatch in {path}: stored {stored}, computed {computed}")]
    ChecksumMismatch {
        path: PathBuf,
        stored: u32,
        computed: u32,
    },

    #[error("no records for {algorithm} on {benchmark}")]
    EmptyCell {
        algorithm: String,
        benchmark: String,
    },

    #[error("nothing to emit: record set is empty")]
    NoRecords,
}

impl CroError {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CroError::NonFiniteObjective { .. } => "NonFiniteObjective",
            CroError::BudgetExhausted { .. } => "BudgetExhausted",
            CroError::DimensionMismatch { .. } => "DimensionMismatch",
            CroError::SameMolecule(_) => "SameMolecule",
            CroError::PopulationTooSmall(_) => "PopulationTooSmall",
            CroError::InvalidConfig(_) => "InvalidConfig",
            CroError::EnergyLedger { .. } => "EnergyLedger",
            CroError::UnknownBenchmark(_) => "UnknownBenchmark",
            CroError::UnknownAlgorithm(_) => "UnknownAlgorithm",
            CroError::Io { .. } => "IoError",
            CroError::Format { .. } => "FormatError",
            CroError::ChecksumMismatch { .. } => "ChecksumMismatch",
            CroError::EmptyCell { .. } => "EmptyCell",
            CroError::NoRecords => "NoRecords",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CroError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        CroError::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = CroError> = std::result::Result<T, E>;
