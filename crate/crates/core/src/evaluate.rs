// SPDX-License-Identifier: MIT OR Apache-2.0

//! Scoring against ground truth and repeated-trial sweeps over `n`.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CpdError, Result};
use crate::listgen::{list_estimate, CandidateList};
use crate::pipeline::{cluster_candidates, ChangePointEstimate, PipelineConfig};
use crate::synthgen::{generate_scenario, GroundTruth, ScenarioConfig};

/// `1` if the number of estimates is wrong, otherwise the summed absolute
/// error between rank-paired estimates and truths.
pub fn score_thetas(estimated: &[f64], truth: &[f64]) -> f64 {
    if estimated.len() != truth.len() {
        return 1.0;
    }
    let mut est = estimated.to_vec();
    let mut tru = truth.to_vec();
    est.sort_by(f64::total_cmp);
    tru.sort_by(f64::total_cmp);
    est.iter().zip(&tru).map(|(a, b)| (a - b).abs()).sum()
}

pub fn score(est: &ChangePointEstimate, truth: &GroundTruth) -> f64 {
    score_thetas(&est.thetas, &truth.thetas)
}

/// Label of the true block that covers most of `[start, end)`; the earlier
/// block wins ties.
pub fn segment_majority_label(segment: (usize, usize), truth: &GroundTruth) -> usize {
    let (start, end) = segment;
    let mut best = (0usize, truth.labels[0]);
    for ((lo, hi), &label) in truth.blocks().into_iter().zip(&truth.labels) {
        let overlap = end.min(hi).saturating_sub(start.max(lo));
        if overlap > best.0 {
            best = (overlap, label);
        }
    }
    best.1
}

/// Error of the raw candidate list when its `kappa` best-ranked entries are
/// taken as the estimate.
pub fn baseline_error(candidates: &CandidateList, truth: &GroundTruth) -> f64 {
    let kappa = truth.kappa();
    if candidates.len() < kappa {
        return 1.0;
    }
    let thetas: Vec<f64> = candidates
        .top_ranked(kappa)
        .iter()
        .map(|&p| p as f64 / candidates.n as f64)
        .collect();
    score_thetas(&thetas, &truth.thetas)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub n: usize,
    pub seed: u64,
    pub kappa: usize,
    pub kappa_hat: usize,
    pub error: f64,
    pub baseline_error: f64,
    /// Wall-clock seconds; not part of any reproducible output.
    pub runtime: f64,
}

/// Generates one scenario and scores the estimator and the raw list on it.
///
/// A run that ends with fewer segments than `r` reports no change points.
pub fn run_trial(scenario: &ScenarioConfig, cfg: &PipelineConfig) -> Result<TrialResult> {
    let started = Instant::now();
    let (x, truth) = generate_scenario(scenario)?;
    let candidates = list_estimate(&x, cfg.lambda, &cfg.distance)?;
    let baseline = baseline_error(&candidates, &truth);
    let estimate = match cluster_candidates(&x, candidates, cfg) {
        Ok((estimate, _)) => estimate,
        Err(CpdError::InsufficientCandidates { .. }) => ChangePointEstimate {
            n: x.len(),
            kappa_hat: 0,
            thetas: Vec::new(),
            positions: Vec::new(),
        },
        Err(e) => return Err(e),
    };
    Ok(TrialResult {
        n: scenario.n,
        seed: scenario.seed,
        kappa: truth.kappa(),
        kappa_hat: estimate.kappa_hat,
        error: score(&estimate, &truth),
        baseline_error: baseline,
        runtime: started.elapsed().as_secs_f64(),
    })
}

/// One row of the error-versus-length table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub trials: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub kappa_accuracy: f64,
    pub baseline_mean_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// All trials, grouped by `n` in grid order, then by seed.
    pub trials: Vec<TrialResult>,
}

fn mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let count = values.clone().count();
    values.sum::<f64>() / count as f64
}

/// Runs `trials` seeded scenarios at every `n` of `grid`.
///
/// Trial `t` uses seed `scenario.seed + t` at every length.
pub fn run_sweep(
    grid: &[usize],
    trials: usize,
    scenario: &ScenarioConfig,
    cfg: &PipelineConfig,
) -> Result<SweepReport> {
    if trials == 0 {
        return Err(CpdError::InvalidSweep("trials must be at least 1".into()));
    }
    if grid.is_empty() {
        return Err(CpdError::InvalidSweep("n-grid is empty".into()));
    }
    cfg.validate()?;
    for &n in grid {
        scenario.with_n_and_seed(n, scenario.seed).validate()?;
    }

    let jobs: Vec<ScenarioConfig> = grid
        .iter()
        .flat_map(|&n| {
            (0..trials as u64)
                .map(move |t| scenario.with_n_and_seed(n, scenario.seed.wrapping_add(t)))
        })
        .collect();
    let results: Vec<TrialResult> = jobs
        .par_iter()
        .map(|job| run_trial(job, cfg))
        .collect::<Result<_>>()?;

    let rows = results
        .chunks(trials)
        .map(|chunk| {
            let errors = chunk.iter().map(|t| t.error);
            let m = mean(errors.clone());
            let var = mean(errors.map(|e| (e - m) * (e - m)));
            SweepRow {
                n: chunk[0].n,
                trials,
                mean_error: m,
                std_error: var.sqrt(),
                kappa_accuracy: mean(
                    chunk
                        .iter()
                        .map(|t| f64::from(u8::from(t.kappa_hat == t.kappa))),
                ),
                baseline_mean_error: mean(chunk.iter().map(|t| t.baseline_error)),
            }
        })
        .collect();
    Ok(SweepReport {
        rows,
        trials: results,
    })
}

/// Line chart of mean error versus `n` for the estimator and the raw list.
pub fn render_svg(rows: &[SweepRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let max_n = rows.iter().map(|r| r.n).max().unwrap_or(1) as f64;
    let min_n = rows.iter().map(|r| r.n).min().unwrap_or(0) as f64;
    let max_e = rows
        .iter()
        .flat_map(|r| [r.mean_error, r.baseline_mean_error])
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let span = (max_n - min_n).max(1.0);
    let px = |n: usize| PAD + (n as f64 - min_n) / span * (W - 2.0 * PAD);
    let py = |e: f64| H - PAD - e / max_e * (H - 2.0 * PAD);
    let polyline = |pick: fn(&SweepRow) -> f64| {
        rows.iter()
            .map(|r| format!("{:.2},{:.2}", px(r.n), py(pick(r))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{PAD}" y1="{y}" x2="{x}" y2="{y}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{y}" stroke="black"/>"#,
        x = W - PAD,
        y = H - PAD
    );
    for r in rows {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            px(r.n),
            H - PAD + 16.0,
            r.n
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{max_e:.3}</text>"#,
        PAD - 4.0,
        PAD + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        polyline(|r| r.mean_error)
    );
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="darkorange" stroke-width="2" stroke-dasharray="6 3" points="{}"/>"#,
        polyline(|r| r.baseline_mean_error)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-size="12" fill="steelblue">estimator</text><text x="{}" y="36" font-size="12" fill="darkorange">candidate list (first kappa)</text>"#,
        W - 220.0,
        W - 220.0
    );
    svg.push_str("</svg>\n");
    svg
}
