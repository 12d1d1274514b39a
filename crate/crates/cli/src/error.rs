// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Read(PathBuf, String),

    #[error("config does not parse: {0}")]
    Parse(String),

    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("invalid value for `{path}`: {message}")]
    Invalid { path: String, message: String },

    #[error(transparent)]
    Core(#[from] hessgrape::Error),

    #[error("every optimization run failed")]
    AllRunsFailed,

    #[error("derivative check failed: {0}")]
    DerivativeMismatch(String),

    #[error("cannot write {0}: {1}")]
    Write(PathBuf, String),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 when a campaign
    /// produced no successful run, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read(..) | Self::Parse(_) | Self::UnknownKeys(_) | Self::Invalid { .. } => 2,
            Self::Core(hessgrape::Error::InvalidConfig(_) | hessgrape::Error::DispersiveBreakdown(_)) => 2,
            Self::AllRunsFailed => 3,
            _ => 1,
        }
    }
}
