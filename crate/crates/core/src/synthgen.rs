// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic stationary ergodic sequences with known change points.
//!
//! The rotation process keeps a phase `r_i = r_{i-1} + alpha (mod 1)` and
//! emits a draw from `u1` when `r_i <= 1/2` and from `u2` otherwise. With an
//! irrational `alpha` the result is stationary ergodic but not a finite-state
//! hidden Markov process, and processes with different `alpha` share the same
//! single-sample marginal.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{Cell, CellMeasure};
use crate::error::{CpdError, Result};
use crate::series::TimeSeries;

/// Rotation parameters standing in for three irrationals near 0.12, 0.13
/// and 0.14.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.1234567891011121, 0.1311121314151617, 0.1415161718192021];

/// Components of the rotation mixture. Every `alpha` spends half of its
/// time in each, so the single-sample marginal is uniform on `[0, 1]`.
pub const DEFAULT_U1: Interval = Interval { lo: 0.0, hi: 0.5 };
pub const DEFAULT_U2: Interval = Interval { lo: 0.5, hi: 1.0 };

const MAX_REJECTIONS: usize = 1_000_000;

/// Closed interval `[lo, hi]` with `lo < hi`, used as a uniform law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let interval = Self { lo, hi };
        interval.validate()?;
        Ok(interval)
    }

    fn validate(&self) -> Result<()> {
        if self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi {
            Ok(())
        } else {
            Err(CpdError::InvalidModel(format!(
                "interval [{}, {}] must satisfy lo < hi",
                self.lo, self.hi
            )))
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.lo + self.width() * rng.random::<f64>()
    }

    /// Probability mass of `[a, b)` under the uniform law on `self`.
    fn mass(&self, a: f64, b: f64) -> f64 {
        let overlap = b.min(self.hi) - a.max(self.lo);
        overlap.max(0.0) / self.width()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Rotation {
        alpha: f64,
        u1: Interval,
        u2: Interval,
    },
    IidUniform(Interval),
    Dirac(f64),
}

/// A process law together with the seed of its sample path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessModel {
    pub kind: ProcessKind,
    pub seed: u64,
}

impl ProcessModel {
    pub fn rotation(alpha: f64, u1: Interval, u2: Interval, seed: u64) -> Self {
        Self {
            kind: ProcessKind::Rotation { alpha, u1, u2 },
            seed,
        }
    }

    pub fn iid_uniform(interval: Interval, seed: u64) -> Self {
        Self {
            kind: ProcessKind::IidUniform(interval),
            seed,
        }
    }

    pub fn dirac(value: f64) -> Self {
        Self {
            kind: ProcessKind::Dirac(value),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ProcessKind::Rotation { alpha, u1, u2 } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(CpdError::InvalidModel(format!(
                        "rotation alpha must lie in (0, 1), got {alpha}"
                    )));
                }
                u1.validate()?;
                u2.validate()
            }
            ProcessKind::IidUniform(interval) => interval.validate(),
            ProcessKind::Dirac(value) if value.is_finite() => Ok(()),
            ProcessKind::Dirac(value) => Err(CpdError::InvalidModel(format!(
                "dirac value must be finite, got {value}"
            ))),
        }
    }
}

/// Rotation phase as a 64-bit binary fraction of the unit circle.
///
/// Addition wraps modulo 2^64, which is exactly `mod 1` on the fraction, and
/// 64 fractional bits match the mantissa of an extended-precision double.
#[derive(Debug, Clone, Copy)]
struct Phase(u64);

impl Phase {
    const HALF: u64 = 1 << 63;

    fn from_fraction(alpha: f64) -> Self {
        // alpha < 1, so alpha * 2^64 < 2^64.
        Self((alpha * 2f64.powi(64)) as u64)
    }

    fn advance(&mut self, step: Phase) {
        self.0 = self.0.wrapping_add(step.0);
    }

    fn in_lower_half(&self) -> bool {
        self.0 <= Self::HALF
    }
}

/// Draws `length` samples from `model`; deterministic in `model.seed`.
pub fn sample_process(model: &ProcessModel, length: usize) -> Result<TimeSeries> {
    model.validate()?;
    if length == 0 {
        return Err(CpdError::EmptySeries);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let values = match model.kind {
        ProcessKind::Rotation { alpha, u1, u2 } => {
            let step = Phase::from_fraction(alpha);
            let mut phase = Phase(rng.next_u64());
            (0..length)
                .map(|_| {
                    phase.advance(step);
                    let x1 = u1.sample(&mut rng);
                    let x2 = u2.sample(&mut rng);
                    if phase.in_lower_half() {
                        x1
                    } else {
                        x2
                    }
                })
                .collect()
        }
        ProcessKind::IidUniform(interval) => {
            (0..length).map(|_| interval.sample(&mut rng)).collect()
        }
        ProcessKind::Dirac(value) => vec![value; length],
    };
    TimeSeries::new(values)
}

impl CellMeasure for ProcessModel {
    fn cell_probability(&self, cell: &Cell) -> Result<f64> {
        match self.kind {
            ProcessKind::Dirac(value) => {
                let inside = (0..cell.dimension()).all(|j| {
                    let (lo, hi) = cell.bounds(j);
                    lo <= value && value < hi
                });
                Ok(if inside { 1.0 } else { 0.0 })
            }
            ProcessKind::IidUniform(interval) => Ok((0..cell.dimension())
                .map(|j| {
                    let (lo, hi) = cell.bounds(j);
                    interval.mass(lo, hi)
                })
                .product()),
            ProcessKind::Rotation { .. } => Err(CpdError::CellProbabilityUnavailable(
                "rotation processes have no closed-form cell probabilities".into(),
            )),
        }
    }
}

/// Parameters of a multi-change-point benchmark sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n: usize,
    /// Number of distinct generating processes.
    pub r: usize,
    /// Number of change points.
    pub kappa: usize,
    pub lambda_min: f64,
    /// One rotation parameter per process; at least `r` entries.
    pub alphas: Vec<f64>,
    pub u1: Interval,
    pub u2: Interval,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n: 30_000,
            r: 3,
            kappa: 4,
            lambda_min: 0.1,
            alphas: DEFAULT_ALPHAS.to_vec(),
            u1: DEFAULT_U1,
            u2: DEFAULT_U2,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    /// Minimum integer gap between change points (and the boundaries).
    pub fn min_gap(&self) -> usize {
        // Guard against n * lambda_min landing a hair above an integer.
        ((self.n as f64 * self.lambda_min) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CpdError::InvalidScenario(msg));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if self.r == 0 {
            return fail("r must be at least 1".into());
        }
        if self.kappa + 1 < self.r {
            return fail(format!(
                "kappa + 1 = {} segments cannot host r = {} distributions",
                self.kappa + 1,
                self.r
            ));
        }
        if self.kappa >= 1 && self.r < 2 {
            return fail("change points need r >= 2 distributions".into());
        }
        if self.alphas.len() < self.r {
            return fail(format!(
                "{} rotation parameters given for r = {}",
                self.alphas.len(),
                self.r
            ));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min < 1.0) {
            return fail(format!(
                "lambda_min must lie in (0, 1), got {}",
                self.lambda_min
            ));
        }
        if self.lambda_min * (self.kappa + 1) as f64 > 1.0 + 1e-12 {
            return fail(format!(
                "{} segments at least {} apart do not fit in (0, 1)",
                self.kappa + 1,
                self.lambda_min
            ));
        }
        if self.min_gap() * (self.kappa + 1) > self.n {
            return fail(format!(
                "{} segments of length >= {} do not fit in n = {}",
                self.kappa + 1,
                self.min_gap(),
                self.n
            ));
        }
        for &alpha in &self.alphas[..self.r] {
            ProcessModel::rotation(alpha, self.u1, self.u2, 0).validate()?;
        }
        Ok(())
    }

    /// Same scenario at a different length and seed.
    pub fn with_n_and_seed(&self, n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            ..self.clone()
        }
    }
}

/// True change points and the process index (1-based) of every segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub n: usize,
    pub thetas: Vec<f64>,
    pub labels: Vec<usize>,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl GroundTruth {
    pub fn kappa(&self) -> usize {
        self.thetas.len()
    }

    /// Change points as sample indices.
    pub fn positions(&self) -> Vec<usize> {
        self.thetas
            .iter()
            .map(|t| (t * self.n as f64).round() as usize)
            .collect()
    }

    /// Half-open `[start, end)` sample ranges of the true segments.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut cuts = vec![0];
        cuts.extend(self.positions());
        cuts.push(self.n);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Process index of segment `k` (1-based): `k mod r`, with 0 read as `r`.
pub fn segment_label(k: usize, r: usize) -> usize {
    (k - 1) % r + 1
}

fn draw_change_points(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if cfg.kappa == 0 {
        return Ok(Vec::new());
    }
    let gap = cfg.min_gap();
    for _ in 0..MAX_REJECTIONS {
        let mut points: Vec<usize> = (0..cfg.kappa).map(|_| rng.random_range(1..cfg.n)).collect();
        points.sort_unstable();
        let separated = std::iter::once(0)
            .chain(points.iter().copied())
            .chain(std::iter::once(cfg.n))
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1] - w[0] >= gap);
        if separated {
            return Ok(points);
        }
    }
    Err(CpdError::InvalidScenario(format!(
        "no change-point draw with separation {gap} after {MAX_REJECTIONS} attempts"
    )))
}

/// Generates a concatenation of rotation-process segments with
/// `cfg.kappa` random change points at least `cfg.lambda_min` apart.
pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<(TimeSeries, GroundTruth)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let positions = draw_change_points(cfg, &mut rng)?;

    let mut cuts = vec![0];
    cuts.extend(&positions);
    cuts.push(cfg.n);

    let mut values = Vec::with_capacity(cfg.n);
    let mut labels = Vec::with_capacity(cfg.kappa + 1);
    for (k, w) in cuts.windows(2).enumerate() {
        let label = segment_label(k + 1, cfg.r);
        let model = ProcessModel::rotation(cfg.alphas[label - 1], cfg.u1, cfg.u2, rng.next_u64());
        values.extend(sample_process(&model, w[1] - w[0])?.into_values());
        labels.push(label);
    }

    let truth = GroundTruth {
        n: cfg.n,
        thetas: positions.iter().map(|&p| p as f64 / cfg.n as f64).collect(),
        labels,
        seed: cfg.seed,
        config: cfg.clone(),
    };
    Ok((TimeSeries::new(values)?, truth))
}
