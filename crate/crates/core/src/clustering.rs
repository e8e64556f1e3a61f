// SPDX-License-Identifier: MIT OR Apache-2.0

//! One-shot farthest-point clustering of consecutive segments.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{empirical_distance, DistanceParams};
use crate::error::{CpdError, Result};

/// Consecutive, non-overlapping `[start, end)` views covering one series.
#[derive(Debug, Clone)]
pub struct SegmentSet<'a> {
    series: &'a [f64],
    bounds: Vec<(usize, usize)>,
}

impl<'a> SegmentSet<'a> {
    /// Segments between consecutive cuts, with `0` and `series.len()` added.
    ///
    /// # Panics
    ///
    /// If the cuts are not strictly increasing inside `(0, len)`.
    pub fn from_cuts(series: &'a [f64], cuts: &[usize]) -> Self {
        let mut points = Vec::with_capacity(cuts.len() + 2);
        points.push(0);
        points.extend_from_slice(cuts);
        points.push(series.len());
        assert!(
            points.windows(2).all(|w| w[0] < w[1]),
            "cuts must be strictly increasing inside the series"
        );
        Self {
            series,
            bounds: points.windows(2).map(|w| (w[0], w[1])).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn bounds(&self) -> &[(usize, usize)] {
        &self.bounds
    }

    pub fn segment(&self, i: usize) -> &'a [f64] {
        let (start, end) = self.bounds[i];
        &self.series[start..end]
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a [f64]> + '_ {
        (0..self.len()).map(|i| self.segment(i))
    }
}

type PairDistance<'a> = Box<dyn Fn(usize, usize) -> f64 + Send + Sync + 'a>;

/// Lazily filled symmetric distance matrix over `count` items.
///
/// Each unordered pair is evaluated at most once, also under concurrent
/// access; the diagonal is zero and never evaluated.
pub struct DistanceCache<'a> {
    count: usize,
    distance: PairDistance<'a>,
    cells: Vec<OnceLock<f64>>,
    evaluations: AtomicUsize,
}

impl<'a> DistanceCache<'a> {
    pub fn new(count: usize, distance: impl Fn(usize, usize) -> f64 + Send + Sync + 'a) -> Self {
        Self {
            count,
            distance: Box::new(distance),
            cells: (0..count * count.saturating_sub(1) / 2)
                .map(|_| OnceLock::new())
                .collect(),
            evaluations: AtomicUsize::new(0),
        }
    }

    /// Empirical distances between the segments of `segments`.
    pub fn for_segments(segments: &SegmentSet<'a>, params: DistanceParams) -> Self {
        let segments = segments.clone();
        Self::new(segments.len(), move |i, j| {
            empirical_distance(segments.segment(i), segments.segment(j), &params)
                .expect("segments are non-empty")
        })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of distinct pairs evaluated so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.count && j < self.count, "index out of range");
        if i == j {
            return 0.0;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        // Row-major upper triangle.
        let slot = lo * (2 * self.count - lo - 1) / 2 + (hi - lo - 1);
        *self.cells[slot].get_or_init(|| {
            self.evaluations.fetch_add(1, Ordering::Relaxed);
            (self.distance)(lo, hi)
        })
    }

    /// Distances from every item to `center`, evaluated in parallel.
    fn column(&self, center: usize) -> Vec<f64> {
        (0..self.count)
            .into_par_iter()
            .map(|i| self.get(i, center))
            .collect()
    }
}

/// Cluster centers and the cluster index of every segment (both 0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub centers: Vec<usize>,
    pub assignment: Vec<usize>,
}

impl Clustering {
    pub fn cluster_count(&self) -> usize {
        self.centers.len()
    }
}

/// Picks `r` centers: the first segment, then repeatedly the segment with
/// the largest distance to its nearest chosen center (smallest index on
/// ties). Chosen centers are never picked again.
pub fn farthest_point_centers(cache: &DistanceCache<'_>, r: usize) -> Result<Vec<usize>> {
    let count = cache.len();
    if r == 0 {
        return Err(CpdError::InvalidClusterCount);
    }
    if r > count {
        return Err(CpdError::InsufficientCandidates { segments: count, r });
    }

    let mut centers = vec![0];
    let mut is_center = vec![false; count];
    is_center[0] = true;
    let mut nearest = vec![f64::INFINITY; count];
    while centers.len() < r {
        let latest = *centers.last().expect("centers start non-empty");
        for (near, d) in nearest.iter_mut().zip(cache.column(latest)) {
            *near = near.min(d);
        }
        let next = (0..count)
            .filter(|&i| !is_center[i])
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if nearest[b] >= nearest[i] => Some(b),
                _ => Some(i),
            })
            .expect("r <= count leaves a non-center");
        is_center[next] = true;
        centers.push(next);
    }
    Ok(centers)
}

/// Assigns each segment to its nearest center (smaller cluster index on
/// ties); every center is assigned to its own cluster.
pub fn assign(cache: &DistanceCache<'_>, centers: &[usize]) -> Result<Clustering> {
    let count = cache.len();
    if centers.is_empty() {
        return Err(CpdError::InvalidClusterCount);
    }
    if let Some(&index) = centers.iter().find(|&&c| c >= count) {
        return Err(CpdError::InvalidSegment { index, count });
    }

    let columns: Vec<Vec<f64>> = centers.iter().map(|&c| cache.column(c)).collect();
    let assignment = (0..count)
        .map(|i| {
            if let Some(own) = centers.iter().position(|&c| c == i) {
                return own;
            }
            (0..centers.len()).fold(0, |best, j| {
                if columns[j][i] < columns[best][i] {
                    j
                } else {
                    best
                }
            })
        })
        .collect();
    Ok(Clustering {
        centers: centers.to_vec(),
        assignment,
    })
}
