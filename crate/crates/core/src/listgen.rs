// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exhaustive list of change-point candidates.
//!
//! A pair of adjacent windows of length `w = floor(n lambda) / 2` is slid
//! over the series on a stride grid and scored by the distance between the
//! windows. Candidates are then picked greedily by score, each pick refined
//! to full resolution within one stride, subject to staying at least
//! `floor(n lambda)` away from the boundaries and from earlier picks.
//!
//! Both windows fit inside any gap of length at least `n lambda`, so every
//! true change point produces a pair of windows each drawn from a single
//! process.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::SegmentSet;
use crate::distance::{empirical_distance, DistanceParams};
use crate::error::{CpdError, Result};
use crate::series::TimeSeries;

/// Window length as a fraction of the separation `floor(n lambda)`.
const WINDOW_DIVISOR: usize = 2;

/// Grid stride as a fraction of the window length.
const STRIDE_DIVISOR: usize = 20;

/// Sorted, `lambda`-separated change-point candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateList {
    pub n: usize,
    pub lambda: f64,
    /// Sample indices; candidate `psi` splits the series into
    /// `x[..psi]` and `x[psi..]`.
    pub positions: Vec<usize>,
    /// Window score at each position (same order as `positions`).
    pub scores: Vec<f64>,
    /// Positions in the order they were picked, highest grid score first.
    pub pick_order: Vec<usize>,
}

impl CandidateList {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `psi / n` for every candidate.
    pub fn normalized(&self) -> Vec<f64> {
        self.positions
            .iter()
            .map(|&p| p as f64 / self.n as f64)
            .collect()
    }

    /// Required spacing between candidates and from the boundaries.
    pub fn separation(&self) -> usize {
        separation(self.n, self.lambda)
    }

    /// The first `k` picks, sorted by position.
    pub fn top_ranked(&self, k: usize) -> Vec<usize> {
        let mut top: Vec<usize> = self.pick_order.iter().take(k).copied().collect();
        top.sort_unstable();
        top
    }
}

fn separation(n: usize, lambda: f64) -> usize {
    (n as f64 * lambda).floor() as usize
}

/// Largest list size compatible with the separation constraint.
pub fn max_candidates(lambda: f64) -> usize {
    ((1.0 / lambda).ceil() as usize).saturating_sub(1)
}

fn validate(n: usize, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(CpdError::InvalidLambda(lambda));
    }
    if (n as f64) * lambda < 6.0 {
        return Err(CpdError::SeriesTooShort { n, lambda });
    }
    Ok(())
}

fn window_score(x: &[f64], t: usize, w: usize, params: &DistanceParams) -> f64 {
    empirical_distance(&x[t - w..t], &x[t..t + w], params)
        .expect("windows are non-empty slices of a validated series")
}

/// Produces the candidate list for `x` at separation `lambda`.
pub fn list_estimate(
    x: &TimeSeries,
    lambda: f64,
    params: &DistanceParams,
) -> Result<CandidateList> {
    let n = x.len();
    validate(n, lambda)?;
    let sep = separation(n, lambda);
    let w = sep / WINDOW_DIVISOR;
    let stride = (w / STRIDE_DIVISOR).max(1);
    let cap = max_candidates(lambda);

    let grid: Vec<usize> = (w..=n - w).step_by(stride).collect();
    let grid_scores: Vec<f64> = grid
        .par_iter()
        .map(|&t| window_score(x, t, w, params))
        .collect();

    // Highest score first, smaller index on ties.
    let mut ranked: Vec<usize> = (0..grid.len()).collect();
    ranked.sort_by(|&i, &j| grid_scores[j].total_cmp(&grid_scores[i]).then(i.cmp(&j)));

    let admissible = |t: usize, picked: &[(usize, f64)]| {
        t >= sep && t <= n - sep && picked.iter().all(|&(c, _)| t.abs_diff(c) >= sep)
    };

    let mut picked: Vec<(usize, f64)> = Vec::new();
    for &g in &ranked {
        if picked.len() >= cap {
            break;
        }
        let t = grid[g];
        if !admissible(t, &picked) {
            continue;
        }
        let lo = t.saturating_sub(stride).max(w);
        let hi = (t + stride).min(n - w);
        let neighborhood: Vec<usize> = (lo..=hi).filter(|&u| admissible(u, &picked)).collect();
        let scores: Vec<f64> = neighborhood
            .par_iter()
            .map(|&u| {
                if u == t {
                    grid_scores[g]
                } else {
                    window_score(x, u, w, params)
                }
            })
            .collect();
        let (best, best_score) =
            neighborhood
                .iter()
                .zip(&scores)
                .fold((t, f64::NEG_INFINITY), |(bt, bs), (&u, &s)| {
                    if s > bs {
                        (u, s)
                    } else {
                        (bt, bs)
                    }
                });
        picked.push((best, best_score));
    }

    let pick_order = picked.iter().map(|&(p, _)| p).collect();
    picked.sort_unstable_by_key(|&(p, _)| p);
    Ok(CandidateList {
        n,
        lambda,
        positions: picked.iter().map(|&(p, _)| p).collect(),
        scores: picked.iter().map(|&(_, s)| s).collect(),
        pick_order,
    })
}

/// The consecutive segments cut at the candidate positions.
pub fn candidate_segments<'a>(x: &'a TimeSeries, candidates: &CandidateList) -> SegmentSet<'a> {
    SegmentSet::from_cuts(x, &candidates.positions)
}
