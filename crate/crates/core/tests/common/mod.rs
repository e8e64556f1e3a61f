// SPDX-License-Identifier: MIT OR Apache-2.0
#![allow(dead_code)]

//! Test-side oracles and fixtures, written without reference to the
//! optimized kernel.

use std::collections::BTreeMap;

use cpd_core::{Interval, ProcessModel, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(j: usize) -> f64 {
    1.0 / (j as f64 * (j as f64 + 1.0))
}

/// Smallest non-zero absolute difference over all pairs, by brute force.
pub fn naive_s_min(a: &[f64], b: &[f64]) -> Option<f64> {
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut best: Option<f64> = None;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let d = (all[i] - all[j]).abs();
            if d > 0.0 && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    best
}

/// First `l` with `2^-l < s_min`; 1 when there is no gap.
pub fn naive_resolution(a: &[f64], b: &[f64]) -> usize {
    match naive_s_min(a, b) {
        None => 1,
        Some(s) => {
            let mut l = 1;
            while 0.5f64.powi(l as i32) >= s {
                l += 1;
            }
            l
        }
    }
}

pub fn naive_depth(n: usize) -> usize {
    let mut log = 0;
    while (1usize << log) < n {
        log += 1;
    }
    n.min(log + 2)
}

/// `sum_cells |nu(a, B) - nu(b, B)|` at one word length and resolution,
/// enumerating cells explicitly.
pub fn naive_inner(a: &[f64], b: &[f64], m: usize, l: usize) -> f64 {
    let side = 2f64.powi(l as i32);
    let mut cells: BTreeMap<Vec<i64>, (usize, usize)> = BTreeMap::new();
    let na = a.len().saturating_sub(m - 1);
    let nb = b.len().saturating_sub(m - 1);
    for i in 0..na {
        let key = a[i..i + m]
            .iter()
            .map(|v| (v * side).floor() as i64)
            .collect();
        cells.entry(key).or_default().0 += 1;
    }
    for i in 0..nb {
        let key = b[i..i + m]
            .iter()
            .map(|v| (v * side).floor() as i64)
            .collect();
        cells.entry(key).or_default().1 += 1;
    }
    let freq = |c: usize, total: usize| {
        if total == 0 {
            0.0
        } else {
            c as f64 / total as f64
        }
    };
    cells
        .values()
        .map(|&(ca, cb)| (freq(ca, na) - freq(cb, nb)).abs())
        .sum()
}

/// Truncated triple sum over `m <= m_max`, `l <= l_max`.
pub fn naive_drop(a: &[f64], b: &[f64], m_max: usize, l_max: usize) -> f64 {
    let mut total = 0.0;
    for m in 1..=m_max {
        for l in 1..=l_max {
            total += w(m) * w(l) * naive_inner(a, b, m, l);
        }
    }
    total
}

/// Per-`m` inner sums once every distinct value has its own cell.
pub fn naive_saturated(a: &[f64], b: &[f64], m_max: usize) -> Vec<f64> {
    let l = naive_resolution(a, b);
    (1..=m_max).map(|m| naive_inner(a, b, m, l)).collect()
}

/// Full resolution series: the drop sum up to the separating level plus the
/// constant remainder `S_m * sum_{l > L} w(l) = S_m / (L + 1)`.
pub fn naive_exact(a: &[f64], b: &[f64], m_max: usize) -> f64 {
    let l = naive_resolution(a, b);
    let tail: f64 = naive_saturated(a, b, m_max)
        .iter()
        .enumerate()
        .map(|(i, s)| w(i + 1) * s / (l as f64 + 1.0))
        .sum();
    naive_drop(a, b, m_max, l) + tail
}

/// Default-parameter distance as computed by the oracle.
pub fn naive_default(a: &[f64], b: &[f64]) -> f64 {
    naive_exact(a, b, naive_depth(a.len().min(b.len())))
}

pub fn uniform(lo: f64, hi: f64, len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn iid(lo: f64, hi: f64, len: usize, seed: u64) -> TimeSeries {
    TimeSeries::new(uniform(lo, hi, len, seed)).unwrap()
}

/// `U[0, 0.3]` for the first half, `U[0.7, 1]` after.
pub fn two_block(n: usize, seed: u64) -> TimeSeries {
    let mut v = uniform(0.0, 0.3, n / 2, seed);
    v.extend(uniform(0.7, 1.0, n - n / 2, seed ^ 0x9e37_79b9_7f4a_7c15));
    TimeSeries::new(v).unwrap()
}

pub fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

pub fn rotation(alpha: f64, seed: u64) -> ProcessModel {
    let d = cpd_core::ScenarioConfig::default();
    ProcessModel::rotation(alpha, d.u1, d.u2, seed)
}
