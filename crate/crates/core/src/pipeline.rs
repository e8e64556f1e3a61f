// SPDX-License-Identifier: MIT OR Apache-2.0

//! The end-to-end estimator: candidate list, segmentation, clustering and
//! removal of redundant candidates.

use serde::{Deserialize, Serialize};

use crate::clustering::{assign, farthest_point_centers, Clustering, DistanceCache};
use crate::distance::DistanceParams;
use crate::error::{CpdError, Result};
use crate::listgen::{candidate_segments, list_estimate, CandidateList};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Lower bound on the normalized separation of change points.
    pub lambda: f64,
    /// Number of distinct generating processes.
    pub r: usize,
    #[serde(default)]
    pub distance: DistanceParams,
}

impl PipelineConfig {
    pub fn new(lambda: f64, r: usize) -> Self {
        Self {
            lambda,
            r,
            distance: DistanceParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(CpdError::InvalidLambda(self.lambda));
        }
        if self.r == 0 {
            return Err(CpdError::InvalidClusterCount);
        }
        Ok(())
    }
}

/// Estimated number of change points and their locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointEstimate {
    pub n: usize,
    pub kappa_hat: usize,
    /// `positions / n`, strictly increasing.
    pub thetas: Vec<f64>,
    pub positions: Vec<usize>,
}

impl ChangePointEstimate {
    fn from_positions(n: usize, positions: Vec<usize>) -> Self {
        Self {
            n,
            kappa_hat: positions.len(),
            thetas: positions.iter().map(|&p| p as f64 / n as f64).collect(),
            positions,
        }
    }
}

/// Intermediate results of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub candidates: CandidateList,
    pub segments: Vec<(usize, usize)>,
    pub clustering: Clustering,
    /// Pairwise segment distances evaluated by the clustering stage.
    pub distance_evaluations: usize,
}

/// Runs the estimator on `x`.
pub fn detect(x: &TimeSeries, cfg: &PipelineConfig) -> Result<ChangePointEstimate> {
    detect_with_diagnostics(x, cfg).map(|(estimate, _)| estimate)
}

pub fn detect_with_diagnostics(
    x: &TimeSeries,
    cfg: &PipelineConfig,
) -> Result<(ChangePointEstimate, Diagnostics)> {
    cfg.validate()?;
    let candidates = list_estimate(x, cfg.lambda, &cfg.distance)?;
    let (estimate, diagnostics) = cluster_candidates(x, candidates, cfg)?;
    Ok((estimate, diagnostics))
}

/// Clustering and redundancy elimination on a given candidate list.
pub fn cluster_candidates(
    x: &TimeSeries,
    candidates: CandidateList,
    cfg: &PipelineConfig,
) -> Result<(ChangePointEstimate, Diagnostics)> {
    cfg.validate()?;
    let segments = candidate_segments(x, &candidates);
    if segments.len() < cfg.r {
        return Err(CpdError::InsufficientCandidates {
            segments: segments.len(),
            r: cfg.r,
        });
    }
    let cache = DistanceCache::for_segments(&segments, cfg.distance);
    let centers = farthest_point_centers(&cache, cfg.r)?;
    let clustering = assign(&cache, &centers)?;

    // Candidate i separates segments i and i + 1.
    let retained: Vec<usize> = candidates
        .positions
        .iter()
        .enumerate()
        .filter(|&(i, _)| clustering.assignment[i] != clustering.assignment[i + 1])
        .map(|(_, &p)| p)
        .collect();

    let estimate = ChangePointEstimate::from_positions(x.len(), retained);
    let diagnostics = Diagnostics {
        segments: segments.bounds().to_vec(),
        distance_evaluations: cache.evaluations(),
        candidates,
        clustering,
    };
    Ok((estimate, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn candidates(n: usize, positions: Vec<usize>) -> CandidateList {
        CandidateList {
            n,
            lambda: 0.1,
            scores: vec![0.0; positions.len()],
            pick_order: positions.clone(),
            positions,
        }
    }

    fn blocks(levels: &[f64], len: usize) -> TimeSeries {
        // Deterministic, non-constant blocks around each level.
        let values = levels
            .iter()
            .flat_map(|&v| (0..len).map(move |i| v + 0.01 * ((i * 7) % 10) as f64))
            .collect();
        TimeSeries::new(values).unwrap()
    }

    #[test]
    fn merges_candidates_inside_a_cluster() {
        let x = blocks(&[0.1, 0.1, 0.6, 0.6, 0.1], 50);
        let c = candidates(250, vec![50, 100, 150, 200]);
        let (est, diag) = cluster_candidates(&x, c, &PipelineConfig::new(0.1, 2)).unwrap();
        assert_eq!(est.positions, vec![100, 200]);
        assert_eq!(est.kappa_hat, 2);
        assert_eq!(est.thetas, vec![0.4, 0.8]);
        assert_eq!(diag.clustering.assignment, vec![0, 0, 1, 1, 0]);
        assert!(diag.distance_evaluations <= 5 * 2);
    }

    #[test]
    fn one_cluster_removes_everything() {
        let x = blocks(&[0.1, 0.6, 0.3], 50);
        let c = candidates(150, vec![50, 100]);
        let (est, _) = cluster_candidates(&x, c, &PipelineConfig::new(0.1, 1)).unwrap();
        assert_eq!(est.kappa_hat, 0);
        assert!(est.thetas.is_empty());
    }

    #[test]
    fn as_many_clusters_as_segments_keeps_everything() {
        let x = blocks(&[0.1, 0.1, 0.1], 50);
        let c = candidates(150, vec![50, 100]);
        let (est, _) = cluster_candidates(&x, c, &PipelineConfig::new(0.1, 3)).unwrap();
        assert_eq!(est.positions, vec![50, 100]);
    }

    #[test]
    fn too_few_segments_for_r() {
        let x = blocks(&[0.1, 0.6], 50);
        let c = candidates(100, vec![50]);
        assert_eq!(
            cluster_candidates(&x, c, &PipelineConfig::new(0.1, 3)).unwrap_err(),
            CpdError::InsufficientCandidates { segments: 2, r: 3 }
        );
    }

    #[test]
    fn validates_config() {
        let x = blocks(&[0.1], 100);
        assert_eq!(
            detect(&x, &PipelineConfig::new(1.5, 1)).unwrap_err(),
            CpdError::InvalidLambda(1.5)
        );
        assert_eq!(
            detect(&x, &PipelineConfig::new(0.1, 0)).unwrap_err(),
            CpdError::InvalidClusterCount
        );
    }
}
