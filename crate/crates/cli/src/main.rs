// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hessgrape_cli::checks::{check_derivatives, demo_two_level};
use hessgrape_cli::config::{BackendSection, ModeName};
use hessgrape_cli::{load_config, run_experiment, CampaignSummary, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "hessgrape", version, about = "GRAPE pulse optimization with exact Hessians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multistart campaign at a single gate duration.
    Run(Campaign),
    /// Campaigns at every configured duration.
    Sweep(Campaign),
    /// Compare analytical derivatives with finite differences.
    CheckDerivatives(Campaign),
    /// Newton vs BFGS vs gradient descent on the two-level trap.
    DemoTwoLevel,
}

#[derive(Args)]
struct Campaign {
    config: PathBuf,
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated, e.g. `newton,bfgs`.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// `eigen`, `taylor` or `taylor:<order>`.
    #[arg(long)]
    backend: Option<String>,
}

impl Campaign {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let bad = |path: &str, message: String| CliError::Invalid { path: path.into(), message };
        let mut cfg = load_config(&self.config)?;
        if let Some(s) = self.seeds {
            cfg.seeds = s;
        }
        if let Some(modes) = &self.modes {
            cfg.modes = modes
                .iter()
                .map(|m| ModeName::parse(m).ok_or_else(|| bad("--modes", format!("unknown mode `{m}`"))))
                .collect::<Result<_, _>>()?;
        }
        if let Some(out) = &self.out {
            cfg.output = out.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(b) = &self.backend {
            cfg.backend = BackendSection::parse(b).ok_or_else(|| bad("--backend", format!("unknown backend `{b}`")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_summary(s: &CampaignSummary) {
    println!("{:>10} {:>18} {:>11} {:>11} {:>9} {:>9}", "duration", "mode", "best J", "mean J", "evals", "time/s");
    for d in &s.durations {
        for m in &d.modes {
            println!(
                "{:>10} {:>18} {:>11.3e} {:>11.3e} {:>9.1} {:>9.3}",
                d.duration,
                m.mode,
                m.best_infidelity.unwrap_or(f64::NAN),
                m.mean_infidelity,
                m.mean_value_evaluations,
                m.mean_wall_time_s
            );
        }
        if let Some(c) = &d.comparison {
            println!(
                "{:>10} {} better on {}, {} better on {}, {} ties (sign test p = {:.3})",
                "", c.first, c.first_better, c.second, c.second_better, c.ties, c.p_value
            );
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.config()?;
            if cfg.durations.len() != 1 {
                return Err(CliError::Invalid {
                    path: "durations".into(),
                    message: format!("`run` takes one duration, got {}; use `sweep`", cfg.durations.len()),
                });
            }
            let s = run_experiment(&cfg, &cfg.durations)?;
            print_summary(&s);
            println!("results in {}", cfg.output.display());
        }
        Command::Sweep(c) => {
            let cfg = c.config()?;
            let s = run_experiment(&cfg, &cfg.durations)?;
            print_summary(&s);
            println!("results in {}", cfg.output.display());
        }
        Command::CheckDerivatives(c) => {
            let cfg = c.config()?;
            let checks = check_derivatives(&cfg)?;
            let mut failed = Vec::new();
            for r in &checks {
                println!(
                    "T = {}: {} parameters, gradient rel. error {:.2e}, Hessian rel. error {:.2e}, asymmetry {:.1e}",
                    r.duration, r.params, r.gradient_error, r.hessian_error, r.hessian_asymmetry
                );
                if !r.passed() {
                    failed.push(r.duration.to_string());
                }
            }
            if !failed.is_empty() {
                return Err(CliError::DerivativeMismatch(format!("T = {}", failed.join(", "))));
            }
        }
        Command::DemoTwoLevel => {
            for r in demo_two_level()? {
                println!(
                    "{:>17}: c = ({:+.5}, {:+.5})  J = {:.3e}  {} iterations, {} evaluations ({})",
                    r.mode.name(),
                    r.x[0],
                    r.x[1],
                    r.infidelity,
                    r.iterations,
                    r.value_evaluations,
                    r.termination.name()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
