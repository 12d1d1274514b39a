// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use hessgrape_cli::experiment::{pulse_file, CampaignSummary, HistogramRow, RunRow, SweepRow};
use hessgrape_cli::{parse_config, run_experiment, CliError, ExperimentConfig};

fn two_level(out: &Path, seeds: usize, workers: usize) -> ExperimentConfig {
    let mut cfg = parse_config("model = \"two-level\"\ndurations = [4.712]\n").unwrap();
    cfg.seeds = seeds;
    cfg.workers = workers;
    cfg.output = out.to_path_buf();
    cfg.validate().unwrap();
    cfg
}

fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    csv::Reader::from_path(path).unwrap().deserialize().collect::<Result<_, _>>().unwrap()
}

fn without_wall_time(rows: Vec<RunRow>) -> Vec<RunRow> {
    rows.into_iter().map(|r| RunRow { wall_time_s: None, ..r }).collect()
}

#[test]
fn two_level_campaign_writes_consistent_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = two_level(dir.path(), 4, 1);
    let summary = run_experiment(&cfg, &cfg.durations).unwrap();

    let runs: Vec<RunRow> = read_csv(&dir.path().join("runs.csv"));
    assert_eq!(runs.len(), 8);
    assert!(runs.iter().all(|r| r.status == "ok" && r.infidelity.is_some()));

    let parsed: CampaignSummary = toml::from_str(&std::fs::read_to_string(dir.path().join("summary.toml")).unwrap()).unwrap();
    assert_eq!(parsed, summary);
    for d in &summary.durations {
        for m in &d.modes {
            assert_eq!(m.histogram.counts.iter().sum::<usize>(), cfg.seeds);
            let best = runs
                .iter()
                .filter(|r| r.mode == m.mode)
                .map(|r| r.infidelity.unwrap())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(m.best_infidelity, Some(best));
            let pulse = csv::Reader::from_path(dir.path().join(pulse_file(d.duration, &m.mode))).unwrap();
            assert_eq!(pulse.into_records().count(), d.steps);
        }
    }

    let hist: Vec<HistogramRow> = read_csv(&dir.path().join("histogram.csv"));
    assert_eq!(hist.iter().filter(|h| h.mode == "newton").map(|h| h.count).sum::<usize>(), 4);
    let sweep: Vec<SweepRow> = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(sweep.len(), 2);
}

#[test]
fn campaigns_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&two_level(a.path(), 4, 1), &[4.712]).unwrap();
    run_experiment(&two_level(b.path(), 4, 3), &[4.712]).unwrap();
    let ra: Vec<RunRow> = read_csv(&a.path().join("runs.csv"));
    let rb: Vec<RunRow> = read_csv(&b.path().join("runs.csv"));
    assert_eq!(without_wall_time(ra), without_wall_time(rb));
    for f in [pulse_file(4.712, "newton"), pulse_file(4.712, "bfgs")] {
        assert_eq!(std::fs::read(a.path().join(&f)).unwrap(), std::fs::read(b.path().join(&f)).unwrap());
    }
}

#[test]
fn sweep_covers_every_duration() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config("model = \"transmon\"\ndurations = [4.0, 8.0]\nmodes = [\"newton\"]\nseeds = 2\n").unwrap();
    cfg.output = dir.path().to_path_buf();
    cfg.optimizer.max_iterations = 20;
    let s = run_experiment(&cfg, &cfg.durations).unwrap();
    assert_eq!(s.durations.iter().map(|d| d.steps).collect::<Vec<_>>(), vec![2, 4]);
    let sweep: Vec<SweepRow> = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(sweep.iter().map(|r| r.duration).collect::<Vec<_>>(), vec![4.0, 8.0]);
    assert!(s.durations.iter().all(|d| d.comparison.is_none()));
}

#[test]
fn total_failure_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = two_level(dir.path(), 2, 1);
    // A negative fixed step makes gradient descent fail validation inside each run.
    cfg.modes = vec![hessgrape_cli::config::ModeName::GradientDescent];
    cfg.optimizer.fixed_step = -1.0;
    let err = run_experiment(&cfg, &cfg.durations).unwrap_err();
    assert!(matches!(err, CliError::Core(_) | CliError::AllRunsFailed), "{err}");
    assert_ne!(err.exit_code(), 0);
}
