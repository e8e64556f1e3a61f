// SPDX-License-Identifier: MIT OR Apache-2.0

//! Change-point estimation for sequences generated by unknown stationary
//! ergodic processes.
//!
//! Given a lower bound `lambda` on the normalized separation between change
//! points and the number `r` of distinct generating processes, the
//! estimator
//!
//! 1. produces an exhaustive, `lambda`-separated list of candidates
//!    ([`listgen`]),
//! 2. cuts the series into the segments those candidates induce,
//! 3. groups the segments into `r` clusters by farthest-point
//!    initialization and nearest-center assignment ([`clustering`]),
//! 4. drops every candidate whose two neighbouring segments share a
//!    cluster ([`pipeline`]).
//!
//! All comparisons between segments use the empirical distributional
//! distance of [`distance`]. [`synthgen`] and [`evaluate`] provide the
//! synthetic benchmark and its scoring.

pub mod clustering;
pub mod distance;
pub mod error;
pub mod evaluate;
pub mod listgen;
pub mod pipeline;
pub mod series;
pub mod synthgen;

pub use clustering::{assign, farthest_point_centers, Clustering, DistanceCache, SegmentSet};
pub use distance::{
    empirical_distance, empirical_distance_to_distribution, frequency, Cell, CellMeasure,
    DistanceParams, Resolution, TailMode, WordDepth,
};
pub use error::{CpdError, Result};
pub use evaluate::{run_sweep, score, segment_majority_label, SweepReport, SweepRow, TrialResult};
pub use listgen::{candidate_segments, list_estimate, CandidateList};
pub use pipeline::{
    detect, detect_with_diagnostics, ChangePointEstimate, Diagnostics, PipelineConfig,
};
pub use series::TimeSeries;
pub use synthgen::{
    generate_scenario, sample_process, GroundTruth, Interval, ProcessKind, ProcessModel,
    ScenarioConfig,
};
