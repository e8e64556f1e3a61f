// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised by the estimation pipeline and its stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CpdError {
    #[error("time series is empty")]
    EmptySeries,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("lambda must lie in (0, 1), got {0}")]
    InvalidLambda(f64),

    #[error("series of length {n} is too short for lambda = {lambda}: need n * lambda >= 6")]
    SeriesTooShort { n: usize, lambda: f64 },

    #[error("number of distributions r must be at least 1")]
    InvalidClusterCount,

    #[error("insufficient candidates for r distributions: {segments} segments, r = {r}")]
    InsufficientCandidates { segments: usize, r: usize },

    #[error("invalid segment index {index} (segment count {count})")]
    InvalidSegment { index: usize, count: usize },

    #[error("invalid process model: {0}")]
    InvalidModel(String),

    #[error("process model cannot evaluate cell probabilities: {0}")]
    CellProbabilityUnavailable(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl CpdError {
    /// True for failures of the algorithm on valid input, as opposed to bad
    /// configuration or malformed data.
    pub fn is_algorithmic(&self) -> bool {
        matches!(self, CpdError::InsufficientCandidates { .. })
    }
}

pub type Result<T> = std::result::Result<T, CpdError>;
