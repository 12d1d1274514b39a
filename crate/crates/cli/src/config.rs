// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration files (TOML).

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use hessgrape::models::{
    steps_for, transmon_problem, two_level_example, Problem, TransmonParams, TWO_LEVEL_DEMO_BOUND,
};
use hessgrape::objective::{ControlBound, Propagator};
use hessgrape::optimize::{
    BarrierParams, ConstraintStyle, HessianModification, LineSearchParams, Mode, OptimizerConfig,
};
use serde::{Deserialize, Deserializer, Serialize};

use crate::custom::CustomSystem;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Transmon,
    TwoLevel,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Newton,
    Bfgs,
    GradientDescent,
}

impl ModeName {
    pub fn mode(self) -> Mode {
        match self {
            Self::Newton => Mode::NewtonExactHessian,
            Self::Bfgs => Mode::Bfgs,
            Self::GradientDescent => Mode::GradientDescent,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match Mode::parse(s)? {
            Mode::NewtonExactHessian => Self::Newton,
            Mode::Bfgs => Self::Bfgs,
            Mode::GradientDescent => Self::GradientDescent,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Eigen,
    Taylor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendSection {
    pub kind: BackendKind,
    /// Truncation order of the Taylor backend.
    pub order: usize,
}

impl Default for BackendSection {
    fn default() -> Self {
        Self { kind: BackendKind::Eigen, order: 12 }
    }
}

impl BackendSection {
    /// `eigen`, `taylor` or `taylor:<order>`.
    pub fn parse(s: &str) -> Option<Self> {
        match s.split_once(':') {
            None if s == "eigen" => Some(Self::default()),
            None if s == "taylor" => Some(Self { kind: BackendKind::Taylor, ..Self::default() }),
            Some(("taylor", l)) => Some(Self { kind: BackendKind::Taylor, order: l.parse().ok()? }),
            _ => None,
        }
    }

    pub fn propagator(&self) -> Propagator {
        match self.kind {
            BackendKind::Eigen => Propagator::default(),
            BackendKind::Taylor => Propagator::Taylor { order: self.order },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintName {
    Barrier,
    Penalty,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModificationName {
    Absolute,
    Shift,
    TrustRegion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BarrierSection {
    pub initial_mu: f64,
    pub reduction: f64,
    pub fraction_to_boundary: f64,
    pub final_mu: f64,
    pub kappa: f64,
}

impl Default for BarrierSection {
    fn default() -> Self {
        let b = BarrierParams::default();
        Self {
            initial_mu: b.initial_mu,
            reduction: b.reduction,
            fraction_to_boundary: b.fraction_to_boundary,
            final_mu: b.final_mu,
            kappa: b.kappa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LineSearchSection {
    pub armijo_c1: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchSection {
    fn default() -> Self {
        let l = LineSearchParams::default();
        Self { armijo_c1: l.armijo_c1, backtrack: l.backtrack, max_backtracks: l.max_backtracks }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSection {
    pub optimality_tol: f64,
    pub step_tol: f64,
    pub max_iterations: usize,
    pub constraint: ConstraintName,
    pub penalty_sigma: f64,
    pub fixed_step: f64,
    pub hessian_modification: ModificationName,
    pub initial_radius: f64,
    pub curvature_skip_tol: f64,
    pub barrier: BarrierSection,
    pub line_search: LineSearchSection,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let c = OptimizerConfig::default();
        Self {
            optimality_tol: c.optimality_tol,
            step_tol: c.step_tol,
            max_iterations: c.max_iterations,
            constraint: ConstraintName::Barrier,
            penalty_sigma: c.penalty_sigma,
            fixed_step: c.fixed_step,
            hessian_modification: ModificationName::Absolute,
            initial_radius: c.initial_radius,
            curvature_skip_tol: c.curvature_skip_tol,
            barrier: BarrierSection::default(),
            line_search: LineSearchSection::default(),
        }
    }
}

impl OptimizerSection {
    pub fn config(&self, mode: Mode) -> OptimizerConfig {
        let b = &self.barrier;
        let l = &self.line_search;
        OptimizerConfig {
            mode,
            constraint_style: match self.constraint {
                ConstraintName::Barrier => ConstraintStyle::Barrier,
                ConstraintName::Penalty => ConstraintStyle::Penalty,
                ConstraintName::None => ConstraintStyle::None,
            },
            optimality_tol: self.optimality_tol,
            step_tol: self.step_tol,
            max_iterations: self.max_iterations,
            penalty_sigma: self.penalty_sigma,
            fixed_step: self.fixed_step,
            barrier: BarrierParams {
                initial_mu: b.initial_mu,
                reduction: b.reduction,
                fraction_to_boundary: b.fraction_to_boundary,
                final_mu: b.final_mu,
                kappa: b.kappa,
            },
            line_search: LineSearchParams {
                armijo_c1: l.armijo_c1,
                backtrack: l.backtrack,
                max_backtracks: l.max_backtracks,
            },
            modification: match self.hessian_modification {
                ModificationName::Absolute => HessianModification::Absolute,
                ModificationName::Shift => HessianModification::Shift,
                ModificationName::TrustRegion => HessianModification::TrustRegion,
            },
            initial_radius: self.initial_radius,
            curvature_skip_tol: self.curvature_skip_tol,
        }
    }
}

/// Transmon parameters in GHz (ordinary frequency).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransmonSection {
    pub qubit1: f64,
    pub qubit2: f64,
    pub anharmonicity1: f64,
    pub anharmonicity2: f64,
    pub cavity: f64,
    pub coupling1: f64,
    pub coupling2: f64,
    pub drive_max: f64,
    pub levels: usize,
}

impl Default for TransmonSection {
    fn default() -> Self {
        let p = TransmonParams::default();
        Self {
            qubit1: p.omega1 / TAU,
            qubit2: p.omega2 / TAU,
            anharmonicity1: p.delta1 / TAU,
            anharmonicity2: p.delta2 / TAU,
            cavity: p.omega_r / TAU,
            coupling1: p.g1 / TAU,
            coupling2: p.g2 / TAU,
            drive_max: p.drive_max / TAU,
            levels: p.levels,
        }
    }
}

impl TransmonSection {
    pub fn params(&self) -> TransmonParams {
        TransmonParams::from_ghz(
            self.qubit1,
            self.qubit2,
            self.anharmonicity1,
            self.anharmonicity2,
            self.cavity,
            self.coupling1,
            self.coupling2,
            self.drive_max,
            self.levels,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoLevelSection {
    /// Symmetric amplitude bound. Campaigns need a finite box to draw starts from.
    pub bound: f64,
}

impl Default for TwoLevelSection {
    fn default() -> Self {
        Self { bound: TWO_LEVEL_DEMO_BOUND }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomSection {
    /// JSON file with the matrices; relative paths are resolved against the
    /// directory of the config file.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// Gate durations; a single number is accepted.
    #[serde(alias = "duration", deserialize_with = "one_or_many")]
    pub durations: Vec<f64>,
    /// Time step. Defaults to 2 for the transmon and to half the (first)
    /// duration for the two-level model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_modes")]
    pub modes: Vec<ModeName>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Worker threads for campaigns; 0 uses all cores.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub backend: BackendSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub transmon: TransmonSection,
    #[serde(default)]
    pub two_level: TwoLevelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSection>,
}

fn default_modes() -> Vec<ModeName> {
    vec![ModeName::Newton, ModeName::Bfgs]
}

fn default_seeds() -> usize {
    10
}

fn default_base_seed() -> u64 {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("hessgrape-out")
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn invalid(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Invalid { path: path.to_string(), message: msg.into() }
}

/// Read, check and complete a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e.to_string()))?;
    let mut cfg = parse_config(&text)?;
    if let Some(custom) = &mut cfg.custom {
        if custom.path.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            custom.path = base.join(&custom.path);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parse config text and fill defaults. Relative custom-model paths are left
/// as written; call [`ExperimentConfig::validate`] before use.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut unknown = Vec::new();
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut track = serde_path_to_error::Track::new();
    let tracked = serde_path_to_error::Deserializer::new(de, &mut track);
    let result: Result<ExperimentConfig, _> = serde_ignored::deserialize(tracked, |p| unknown.push(p.to_string()));
    let mut cfg = match result {
        Ok(c) => c,
        Err(e) => {
            let path = track.path().to_string();
            return Err(if path == "." { CliError::Parse(e.to_string()) } else { invalid(&path, e.to_string()) });
        }
    };
    if !unknown.is_empty() {
        unknown.sort();
        return Err(CliError::UnknownKeys(unknown));
    }
    if cfg.dt.is_none() {
        cfg.dt = match cfg.model {
            ModelKind::Transmon => Some(2.0),
            ModelKind::TwoLevel => cfg.durations.first().map(|t| t / 2.0),
            ModelKind::Custom => None,
        };
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(f64::NAN)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.durations.is_empty() {
            return Err(invalid("durations", "at least one duration is required"));
        }
        let dt = self.dt.ok_or_else(|| invalid("dt", "required for this model"))?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        for (i, &t) in self.durations.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(invalid(&format!("durations[{i}]"), format!("must be positive, got {t}")));
            }
            steps_for(t, dt).map_err(|_| invalid(&format!("durations[{i}]"), format!("dt = {dt} does not divide {t}")))?;
        }
        if self.modes.is_empty() {
            return Err(invalid("modes", "at least one mode is required"));
        }
        if self.seeds == 0 {
            return Err(invalid("seeds", "must be at least 1"));
        }
        if self.backend.kind == BackendKind::Taylor && self.backend.order == 0 {
            return Err(invalid("backend.order", "must be at least 1"));
        }
        self.optimizer.config(Mode::NewtonExactHessian).validate().map_err(|e| invalid("optimizer", e.to_string()))?;
        match self.model {
            ModelKind::Transmon => {
                self.transmon.params().validate().map_err(|e| invalid("transmon", e.to_string()))?;
            }
            ModelKind::TwoLevel => {
                let b = self.two_level.bound;
                if !(b.is_finite() && b > 0.0) {
                    return Err(invalid("two_level.bound", format!("must be positive and finite, got {b}")));
                }
            }
            ModelKind::Custom => {
                let c = self.custom.as_ref().ok_or_else(|| invalid("custom.path", "required for model = custom"))?;
                CustomSystem::load(&c.path)?;
            }
        }
        Ok(())
    }

    pub fn steps(&self, duration: f64) -> Result<usize, CliError> {
        steps_for(duration, self.dt()).map_err(|e| invalid("dt", e.to_string()))
    }

    /// The control problem at one duration.
    pub fn problem(&self, duration: f64) -> Result<Problem, CliError> {
        let dt = self.dt();
        let problem = match self.model {
            ModelKind::Transmon => transmon_problem(&self.transmon.params(), duration, dt)?,
            ModelKind::TwoLevel => two_level_example(duration, self.steps(duration)?)?
                .with_bounds(vec![ControlBound::symmetric(self.two_level.bound)?])?,
            ModelKind::Custom => {
                let c = self.custom.as_ref().ok_or_else(|| invalid("custom.path", "required for model = custom"))?;
                CustomSystem::load(&c.path)?.problem(duration, dt)?
            }
        };
        Ok(problem)
    }

    pub fn optimizer_config(&self, mode: ModeName) -> OptimizerConfig {
        self.optimizer.config(mode.mode())
    }
}
