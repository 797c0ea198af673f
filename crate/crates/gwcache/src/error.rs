use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("invalid file subset: {0}")]
    InvalidSubset(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no sum-tight candidate among {0} operating points")]
    NoSumTightCandidate(usize),
    #[error("search scale exceeded: {0}")]
    ScaleExceeded(String),
    #[error("block length F = {f} violates integrality: {what}")]
    Divisibility { f: u64, what: String },
    #[error("receiver {receiver} cannot recover packet {packet}")]
    Unrecoverable { receiver: usize, packet: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}

pub(crate) fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    check_range(name, value, 0.0, f64::INFINITY, "[0, inf)")
}
