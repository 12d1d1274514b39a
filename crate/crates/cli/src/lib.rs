// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Configuration, campaign orchestration and report files for the
//! `hessgrape` command-line tool.

pub mod checks;
pub mod config;
pub mod custom;
pub mod error;
pub mod experiment;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use error::CliError;
pub use experiment::{run_experiment, CampaignSummary};
