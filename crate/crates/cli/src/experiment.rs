// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Paired multistart campaigns over one or more gate durations, and the
//! files they leave behind.
//!
//! In the output directory:
//!
//! - `runs.csv`: one row per (duration, seed, mode)
//! - `summary.toml`: best/mean statistics and histograms per duration and mode
//! - `histogram.csv`: the same histograms in long format
//! - `sweep.csv`: best and mean infidelity against duration
//! - `pulses/T<duration>_<mode>.csv`: amplitudes of the best run

use std::fs;
use std::path::{Path, PathBuf};

use hessgrape::objective::ControlPulse;
use hessgrape::optimize::{multistart, paired_sign_test, CampaignResult, ModeSpec, SeedSpec};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Final values closer than this count as the same minimum in the paired comparison.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramTable {
    /// `log10(J)` bin edges; the outer bins also collect values beyond them.
    pub log10_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub mode: String,
    pub runs: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_infidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_seed: Option<u64>,
    pub mean_infidelity: f64,
    pub mean_value_evaluations: f64,
    pub mean_gradient_evaluations: f64,
    pub mean_hessian_evaluations: f64,
    pub mean_iterations: f64,
    pub mean_wall_time_s: f64,
    pub histogram: HistogramTable,
}

/// First mode against the second, seed by seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub first: String,
    pub second: String,
    pub first_better: usize,
    pub second_better: usize,
    pub ties: usize,
    /// One-sided sign-test p-value for "first is better".
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationReport {
    pub duration: f64,
    pub steps: usize,
    pub modes: Vec<ModeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<PairedComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub seeds: usize,
    pub base_seed: u64,
    pub dt: f64,
    pub durations: Vec<DurationReport>,
}

impl CampaignSummary {
    pub fn report(&self, duration: f64, mode: &str) -> Option<&ModeReport> {
        self.durations.iter().find(|d| d.duration == duration)?.modes.iter().find(|m| m.mode == mode)
    }
}

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub duration: f64,
    pub seed_index: usize,
    pub seed: u64,
    pub mode: String,
    pub status: String,
    pub infidelity: Option<f64>,
    pub iterations: Option<usize>,
    pub value_evaluations: Option<usize>,
    pub gradient_evaluations: Option<usize>,
    pub hessian_evaluations: Option<usize>,
    pub termination: Option<String>,
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub duration: f64,
    pub mode: String,
    pub best_infidelity: Option<f64>,
    pub mean_infidelity: f64,
    pub mean_value_evaluations: f64,
    pub mean_wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub duration: f64,
    pub mode: String,
    pub log10_lo: f64,
    pub log10_hi: f64,
    pub count: usize,
}

pub struct Campaign {
    pub duration: f64,
    pub steps: usize,
    pub dt: f64,
    pub result: CampaignResult,
}

fn campaign(cfg: &ExperimentConfig, duration: f64) -> Result<Campaign, CliError> {
    let problem = cfg.problem(duration)?;
    let objective = problem.objective()?.with_backend(cfg.backend.propagator());
    let modes: Vec<ModeSpec> = cfg.modes.iter().map(|&m| ModeSpec::from_config(cfg.optimizer_config(m))).collect();
    let result = multistart(
        &objective,
        &problem.optimizer_bounds(),
        cfg.seeds,
        SeedSpec::new(cfg.base_seed),
        &modes,
        cfg.workers,
    )?;
    Ok(Campaign { duration, steps: problem.steps, dt: problem.dt, result })
}

fn duration_report(c: &Campaign) -> DurationReport {
    let modes: Vec<ModeReport> = c
        .result
        .summaries
        .iter()
        .map(|s| ModeReport {
            mode: s.label.clone(),
            runs: s.runs,
            failures: s.failures,
            best_infidelity: s.best_value(),
            best_seed: s.best_seed_index().map(|i| c.result.records.iter().find(|r| r.seed_index == i).unwrap().seed),
            mean_infidelity: s.mean_value,
            mean_value_evaluations: s.mean_value_evaluations,
            mean_gradient_evaluations: s.mean_gradient_evaluations,
            mean_hessian_evaluations: s.mean_hessian_evaluations,
            mean_iterations: s.mean_iterations,
            mean_wall_time_s: s.mean_wall_time.as_secs_f64(),
            histogram: HistogramTable { log10_edges: s.histogram.edges.clone(), counts: s.histogram.counts.clone() },
        })
        .collect();
    let comparison = if modes.len() >= 2 {
        let (a, b) = (&modes[0].mode, &modes[1].mode);
        paired_sign_test(&c.result.final_values(a), &c.result.final_values(b), TIE_TOL).ok().map(|t| PairedComparison {
            first: a.clone(),
            second: b.clone(),
            first_better: t.wins,
            second_better: t.losses,
            ties: t.ties,
            p_value: t.p_value,
        })
    } else {
        None
    };
    DurationReport { duration: c.duration, steps: c.steps, modes, comparison }
}

fn run_rows(c: &Campaign) -> Vec<RunRow> {
    c.result
        .records
        .iter()
        .map(|r| match &r.outcome {
            Ok(rep) => RunRow {
                duration: c.duration,
                seed_index: r.seed_index,
                seed: r.seed,
                mode: r.mode.clone(),
                status: "ok".into(),
                infidelity: Some(rep.value),
                iterations: Some(rep.iterations()),
                value_evaluations: Some(rep.evaluations.value),
                gradient_evaluations: Some(rep.evaluations.gradient),
                hessian_evaluations: Some(rep.evaluations.hessian),
                termination: Some(rep.termination.name().into()),
                wall_time_s: Some(rep.wall_time.as_secs_f64()),
            },
            Err(e) => RunRow {
                duration: c.duration,
                seed_index: r.seed_index,
                seed: r.seed,
                mode: r.mode.clone(),
                status: format!("error: {e}"),
                infidelity: None,
                iterations: None,
                value_evaluations: None,
                gradient_evaluations: None,
                hessian_evaluations: None,
                termination: None,
                wall_time_s: None,
            },
        })
        .collect()
}

fn write_err(path: &Path, e: impl ToString) -> CliError {
    CliError::Write(path.to_path_buf(), e.to_string())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

fn write_pulse(path: &Path, pulse: &ControlPulse) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    let mut header = vec!["step".to_string(), "t_start".into(), "t_end".into()];
    header.extend((0..pulse.controls()).map(|k| format!("c{k}")));
    w.write_record(&header).map_err(|e| write_err(path, e))?;
    for s in 0..pulse.steps() {
        let mut row = vec![s.to_string(), (s as f64 * pulse.dt()).to_string(), ((s + 1) as f64 * pulse.dt()).to_string()];
        row.extend(pulse.row(s).iter().map(f64::to_string));
        w.write_record(&row).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

/// File name of the best pulse of `mode` at `duration`.
pub fn pulse_file(duration: f64, mode: &str) -> PathBuf {
    PathBuf::from("pulses").join(format!("T{duration}_{mode}.csv"))
}

/// Run the campaign at each of `durations` and write all outputs to
/// `cfg.output`. Individual failed runs are recorded in `runs.csv`; the
/// call fails with [`CliError::AllRunsFailed`] only when no run succeeded.
pub fn run_experiment(cfg: &ExperimentConfig, durations: &[f64]) -> Result<CampaignSummary, CliError> {
    let campaigns = durations.iter().map(|&t| campaign(cfg, t)).collect::<Result<Vec<_>, _>>()?;

    let out = &cfg.output;
    fs::create_dir_all(out.join("pulses")).map_err(|e| write_err(out, e))?;
    let summary = CampaignSummary {
        seeds: cfg.seeds,
        base_seed: cfg.base_seed,
        dt: cfg.dt(),
        durations: campaigns.iter().map(duration_report).collect(),
    };

    let runs: Vec<RunRow> = campaigns.iter().flat_map(run_rows).collect();
    write_csv(&out.join("runs.csv"), &runs)?;
    let mut sweep = Vec::new();
    let mut hist = Vec::new();
    for d in &summary.durations {
        for m in &d.modes {
            sweep.push(SweepRow {
                duration: d.duration,
                mode: m.mode.clone(),
                best_infidelity: m.best_infidelity,
                mean_infidelity: m.mean_infidelity,
                mean_value_evaluations: m.mean_value_evaluations,
                mean_wall_time_s: m.mean_wall_time_s,
            });
            for (i, &count) in m.histogram.counts.iter().enumerate() {
                hist.push(HistogramRow {
                    duration: d.duration,
                    mode: m.mode.clone(),
                    log10_lo: m.histogram.log10_edges[i],
                    log10_hi: m.histogram.log10_edges[i + 1],
                    count,
                });
            }
        }
    }
    write_csv(&out.join("sweep.csv"), &sweep)?;
    write_csv(&out.join("histogram.csv"), &hist)?;
    let toml = toml::to_string(&summary).map_err(|e| write_err(&out.join("summary.toml"), e))?;
    fs::write(out.join("summary.toml"), toml).map_err(|e| write_err(&out.join("summary.toml"), e))?;

    for c in &campaigns {
        for s in &c.result.summaries {
            let Some(best) = s.best_seed_index() else { continue };
            let record = c.result.records.iter().find(|r| r.seed_index == best && r.mode == s.label).unwrap();
            let rep = record.outcome.as_ref().expect("best run succeeded");
            let controls = rep.x.len() / c.steps;
            let pulse = ControlPulse::from_flat(c.steps, controls, c.dt, rep.x.as_slice())?;
            write_pulse(&out.join(pulse_file(c.duration, &s.label)), &pulse)?;
        }
    }

    if campaigns.iter().all(|c| c.result.all_failed()) {
        return Err(CliError::AllRunsFailed);
    }
    Ok(summary)
}
