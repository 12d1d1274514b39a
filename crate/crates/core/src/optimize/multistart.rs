// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use std::time::Duration;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{minimize, Bounds, Objective, OptimizationReport, OptimizerConfig};
use crate::error::{Error, Result};

/// Seed of one random initial point.
///
/// Seed index `i` of a campaign with base seed `b` uses `ChaCha8Rng` seeded
/// with `b + i` (wrapping), so every run is reproducible on its own and
/// independent of the worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub seed: u64,
}

impl SeedSpec {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// The seed for campaign index `index` when `self` is the base seed.
    pub fn offset(self, index: usize) -> Self {
        Self { seed: self.seed.wrapping_add(index as u64) }
    }

    /// Draw each coordinate uniformly from its (finite) bounds.
    pub fn initial_point(&self, bounds: &Bounds) -> Result<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut x = DVector::zeros(bounds.len());
        for i in 0..bounds.len() {
            let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidConfig("random starts need finite bounds on every parameter".into()));
            }
            x[i] = if lo == hi { lo } else { rng.random_range(lo..=hi) };
        }
        Ok(x)
    }
}

/// A labelled optimizer configuration taking part in a campaign.
#[derive(Debug, Clone)]
pub struct ModeSpec {
    pub label: String,
    pub config: OptimizerConfig,
}

impl ModeSpec {
    pub fn new(label: impl Into<String>, config: OptimizerConfig) -> Self {
        Self { label: label.into(), config }
    }

    /// Labelled by the mode name.
    pub fn from_config(config: OptimizerConfig) -> Self {
        Self { label: config.mode.name().to_string(), config }
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed_index: usize,
    pub seed: u64,
    pub mode: String,
    pub initial: DVector<f64>,
    pub outcome: std::result::Result<OptimizationReport, Error>,
}

/// Counts of `log10 J` over fixed decade bins.
///
/// Values below the first edge land in the first bin, values above the last
/// edge in the last one, so counts always add up to the number of values.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub const LOG10_MIN: f64 = -16.0;
    pub const LOG10_MAX: f64 = 0.0;

    /// One bin per decade between `1e-16` and `1`.
    pub fn decades(values: impl IntoIterator<Item = f64>) -> Self {
        let bins = (Self::LOG10_MAX - Self::LOG10_MIN) as usize;
        let edges: Vec<f64> = (0..=bins).map(|i| Self::LOG10_MIN + i as f64).collect();
        let mut counts = vec![0; bins];
        for v in values {
            let l = if v > 0.0 { v.log10() } else { f64::NEG_INFINITY };
            let bin = ((l - Self::LOG10_MIN).floor().max(0.0) as usize).min(bins - 1);
            counts[bin] += 1;
        }
        Self { edges, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Aggregate statistics of one mode over all seeds.
#[derive(Debug, Clone)]
pub struct ModeSummary {
    pub label: String,
    pub runs: usize,
    pub failures: usize,
    /// Best final value and the seed index achieving it; `None` when every run failed.
    pub best: Option<(f64, usize)>,
    pub mean_value: f64,
    pub mean_value_evaluations: f64,
    pub mean_gradient_evaluations: f64,
    pub mean_hessian_evaluations: f64,
    pub mean_iterations: f64,
    pub mean_wall_time: Duration,
    /// Over successful runs.
    pub histogram: Histogram,
}

impl ModeSummary {
    pub fn best_value(&self) -> Option<f64> {
        self.best.map(|(v, _)| v)
    }

    pub fn best_seed_index(&self) -> Option<usize> {
        self.best.map(|(_, i)| i)
    }

    fn from_records(label: &str, records: &[&RunRecord]) -> Self {
        let ok: Vec<(usize, &OptimizationReport)> = records
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|rep| (r.seed_index, rep)))
            .collect();
        let n = ok.len();
        let mean = |f: &dyn Fn(&OptimizationReport) -> f64| {
            if n == 0 {
                f64::NAN
            } else {
                ok.iter().map(|(_, r)| f(r)).sum::<f64>() / n as f64
            }
        };
        let best = ok
            .iter()
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
            .map(|(i, r)| (r.value, *i));
        let mean_wall_time = if n == 0 {
            Duration::ZERO
        } else {
            ok.iter().map(|(_, r)| r.wall_time).sum::<Duration>() / n as u32
        };
        Self {
            label: label.to_string(),
            runs: records.len(),
            failures: records.len() - n,
            best,
            mean_value: mean(&|r| r.value),
            mean_value_evaluations: mean(&|r| r.evaluations.value as f64),
            mean_gradient_evaluations: mean(&|r| r.evaluations.gradient as f64),
            mean_hessian_evaluations: mean(&|r| r.evaluations.hessian as f64),
            mean_iterations: mean(&|r| r.iterations() as f64),
            mean_wall_time,
            histogram: Histogram::decades(ok.iter().map(|(_, r)| r.value)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    /// Seed-major: all modes of seed 0, then all modes of seed 1, and so on.
    pub records: Vec<RunRecord>,
    /// In the order the modes were given.
    pub summaries: Vec<ModeSummary>,
}

impl CampaignResult {
    pub fn summary(&self, label: &str) -> Option<&ModeSummary> {
        self.summaries.iter().find(|s| s.label == label)
    }

    /// Final values of one mode by seed index; `None` for failed runs.
    pub fn final_values(&self, label: &str) -> Vec<Option<f64>> {
        self.records
            .iter()
            .filter(|r| r.mode == label)
            .map(|r| r.outcome.as_ref().ok().map(|rep| rep.value))
            .collect()
    }

    pub fn all_failed(&self) -> bool {
        self.records.iter().all(|r| r.outcome.is_err())
    }
}

/// Run every mode from the same `seeds` random starts.
///
/// Runs are spread over a pool of `workers` threads (0 picks the rayon
/// default). A failed run is recorded and the campaign carries on.
pub fn multistart<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    seeds: usize,
    base: SeedSpec,
    modes: &[ModeSpec],
    workers: usize,
) -> Result<CampaignResult> {
    if seeds == 0 {
        return Err(Error::InvalidConfig("a campaign needs at least one seed".into()));
    }
    if modes.is_empty() {
        return Err(Error::InvalidConfig("a campaign needs at least one mode".into()));
    }
    for m in modes {
        m.config.validate()?;
    }
    if bounds.len() != objective.num_params() {
        return Err(Error::DimensionMismatch {
            context: "campaign bounds",
            expected: objective.num_params(),
            found: bounds.len(),
        });
    }
    let starts: Vec<DVector<f64>> =
        (0..seeds).map(|i| base.offset(i).initial_point(bounds)).collect::<Result<_>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let jobs: Vec<(usize, usize)> = (0..seeds).flat_map(|s| (0..modes.len()).map(move |m| (s, m))).collect();
    let records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, m)| RunRecord {
                seed_index: s,
                seed: base.offset(s).seed,
                mode: modes[m].label.clone(),
                initial: starts[s].clone(),
                outcome: minimize(objective, &starts[s], bounds, &modes[m].config),
            })
            .collect()
    });

    let summaries = modes
        .iter()
        .map(|m| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.mode == m.label).collect();
            ModeSummary::from_records(&m.label, &mine)
        })
        .collect();
    Ok(CampaignResult { records, summaries })
}

/// One-sided paired sign test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTest {
    /// Pairs where the first sample is smaller.
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    /// `P(X >= wins)` for `X ~ Binomial(wins + losses, 1/2)`.
    pub p_value: f64,
}

/// Test whether `a` tends to be smaller than `b`. Pairs closer than
/// `tie_tol` (or with a missing side) are dropped as ties.
pub fn paired_sign_test(a: &[Option<f64>], b: &[Option<f64>], tie_tol: f64) -> Result<SignTest> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { context: "paired samples", expected: a.len(), found: b.len() });
    }
    let (mut wins, mut losses, mut ties) = (0, 0, 0);
    for (x, y) in a.iter().zip(b) {
        match (x, y) {
            (Some(x), Some(y)) if (x - y).abs() > tie_tol => {
                if x < y {
                    wins += 1
                } else {
                    losses += 1
                }
            }
            _ => ties += 1,
        }
    }
    Ok(SignTest { wins, losses, ties, p_value: binomial_upper_tail(wins + losses, wins) })
}

/// `P(X >= k)` for `X ~ Binomial(n, 1/2)`.
fn binomial_upper_tail(n: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    // Accumulate log-binomial coefficients to stay finite for large n.
    let ln_half_n = n as f64 * 0.5_f64.ln();
    let mut ln_choose = 0.0;
    let mut total = 0.0;
    for i in 0..=n {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        if i >= k {
            total += (ln_choose + ln_half_n).exp();
        }
    }
    total.min(1.0)
}
