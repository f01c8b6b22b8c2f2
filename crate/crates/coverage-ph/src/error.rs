//! Crate-wide error type and process exit-code mapping.

use std::path::PathBuf;

use thiserror::Error;

/// Top-level error for the pipeline. Every failure classifies as either a
/// validation problem (bad input data or configuration, exit code 1) or a
/// provider/cache problem (exit code 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("facility data: {0}")]
    Ingest(#[from] IngestError),

    #[error("travel time: {0}")]
    TravelTime(#[from] TravelTimeError),

    #[error("filtration: {0}")]
    Filtration(#[from] FiltrationError),

    #[error("statistics: {0}")]
    Stats(#[from] StatsError),

    #[error("configuration: {0}")]
    Config(String),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 0 success, 1 validation error, 2 provider/cache error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TravelTime(e) => e.exit_code(),
            _ => 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("row {row}: {message}")]
    InvalidRow { row: usize, message: String },

    #[error("duplicate facility id {0}")]
    DuplicateFacility(String),

    #[error("duplicate county key {0}")]
    DuplicateCounty(String),

    #[error("missing column {0}")]
    MissingColumn(String),

    #[error("facility {facility} references unknown county {county}")]
    UnknownCounty { facility: String, county: String },

    #[error("need at least 2 facilities, got {0}")]
    TooFewFacilities(usize),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum TravelTimeError {
    #[error("provider {provider} failed for {origin}->{dest} ({mode}): {message}")]
    ProviderFailure {
        provider: String,
        origin: String,
        dest: String,
        mode: String,
        message: String,
    },

    #[error("carless population stranded for pair {a}-{b}: no transit or walk route in either direction")]
    Stranded { a: String, b: String },

    #[error("cache conflict for {origin}->{dest} ({mode}): {existing:?} vs {incoming:?}")]
    CacheConflict {
        origin: String,
        dest: String,
        mode: String,
        existing: Option<f64>,
        incoming: Option<f64>,
    },

    #[error("cache incomplete: {} leg(s) missing, first: {}", missing.len(), missing.first().map(String::as_str).unwrap_or("-"))]
    CacheIncomplete { missing: Vec<String> },

    #[error("cache file {path}: line {line}: {message}")]
    CacheParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("cache file {path}: {message}")]
    CacheWrite { path: PathBuf, message: String },

    #[error("facility {facility} references unknown county {county}")]
    UnknownCounty { facility: String, county: String },
}

impl TravelTimeError {
    fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Error)]
pub enum FiltrationError {
    #[error("face closure violated: face {face:?} of simplex {simplex:?} at position {position} appears later or not at all")]
    FaceClosure {
        simplex: Vec<usize>,
        face: Vec<usize>,
        position: usize,
    },
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no observations above threshold {0} min")]
    EmptyAfterTrim(f64),

    #[error("log transform requires positive values, got {0}")]
    NonPositive(f64),

    #[error("sample too small: need at least {need}, got {got}")]
    SampleTooSmall { need: usize, got: usize },

    #[error("degenerate ranks: zero rank variance in both samples")]
    DegenerateRanks,
}
