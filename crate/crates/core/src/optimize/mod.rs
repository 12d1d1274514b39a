// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Box-constrained minimization.
//!
//! [`minimize`] runs a log-barrier interior-point method: for a decreasing
//! sequence of barrier weights `mu` it minimizes the merit function
//! `J(x) - mu sum_i [log(x_i - lo_i) + log(hi_i - x_i)]` with damped Newton
//! steps, using either the exact Hessian of `J` or a BFGS approximation of
//! it. The barrier curvature `z_i / d_i` comes from bound-multiplier
//! estimates `z` updated alongside `x`. Iterates stay strictly inside the
//! box through a fraction-to-boundary rule.
//!
//! [`gradient_descent_fixed`] and [`PenaltyObjective`] provide the simpler
//! baselines, and [`multistart`] runs paired campaigns over random seeds.

mod barrier;
mod bfgs;
mod descent;
mod line_search;
mod multistart;
mod penalty;

pub use barrier::fraction_to_boundary;
pub use bfgs::{bfgs_update, BfgsUpdate};
pub use descent::gradient_descent_fixed;
pub use line_search::{line_search, LineSearchError, LineSearchParams, LineStep};
pub use multistart::{
    multistart, paired_sign_test, CampaignResult, Histogram, ModeSpec, ModeSummary, RunRecord,
    SeedSpec, SignTest,
};
pub use penalty::PenaltyObjective;

use std::cell::Cell;
use std::time::Duration;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::objective::ControlBound;

/// Which derivatives an evaluation must provide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Value,
    Gradient,
    Hessian,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Option<DVector<f64>>,
    pub hessian: Option<DMatrix<f64>>,
}

impl Evaluation {
    pub fn value(value: f64) -> Self {
        Self { value, gradient: None, hessian: None }
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.as_ref().is_none_or(|g| g.iter().all(|v| v.is_finite()))
            && self.hessian.as_ref().is_none_or(|h| h.iter().all(|v| v.is_finite()))
    }
}

/// A twice-differentiable cost function of a real parameter vector.
///
/// Implementations must be reentrant: campaigns evaluate one objective from
/// several threads.
pub trait Objective: Sync {
    fn num_params(&self) -> usize;

    /// Evaluate at `x`, providing at least the derivatives `order` asks for.
    fn evaluate(&self, x: &DVector<f64>, order: Order) -> Result<Evaluation>;
}

impl<O: Objective + ?Sized> Objective for &O {
    fn num_params(&self) -> usize {
        (**self).num_params()
    }

    fn evaluate(&self, x: &DVector<f64>, order: Order) -> Result<Evaluation> {
        (**self).evaluate(x, order)
    }
}

/// Per-parameter box `[lower_i, upper_i]`; infinite entries are unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl Bounds {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { context: "bounds", expected: lower.len(), found: upper.len() });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l.is_nan() || u.is_nan() || l >= u) {
            return Err(Error::InvalidConfig("every lower bound must be below its upper bound".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn unbounded(n: usize) -> Self {
        Self { lower: DVector::from_element(n, f64::NEG_INFINITY), upper: DVector::from_element(n, f64::INFINITY) }
    }

    pub fn uniform(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(DVector::from_element(n, lower), DVector::from_element(n, upper))
    }

    /// Expand per-control bounds over `steps` time steps (control-major).
    pub fn from_controls(bounds: &[ControlBound], steps: usize) -> Self {
        let lower = DVector::from_iterator(bounds.len() * steps, bounds.iter().flat_map(|b| std::iter::repeat_n(b.min, steps)));
        let upper = DVector::from_iterator(bounds.len() * steps, bounds.iter().flat_map(|b| std::iter::repeat_n(b.max, steps)));
        Self { lower, upper }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn has_finite(&self) -> bool {
        self.lower.iter().chain(self.upper.iter()).any(|b| b.is_finite())
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.iter().zip(self.lower.iter().zip(self.upper.iter())).all(|(v, (l, u))| v >= l && v <= u)
    }

    pub fn strictly_contains(&self, x: &DVector<f64>) -> bool {
        x.iter().zip(self.lower.iter().zip(self.upper.iter())).all(|(v, (l, u))| v > l && v < u)
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            x.len(),
            x.iter().zip(self.lower.iter().zip(self.upper.iter())).map(|(v, (l, u))| v.clamp(*l, *u)),
        )
    }

    /// `|P(x - g) - x|_inf`, zero exactly at a first-order stationary point
    /// of the box-constrained problem.
    pub fn projected_gradient_norm(&self, x: &DVector<f64>, g: &DVector<f64>) -> f64 {
        (self.project(&(x - g)) - x).amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    NewtonExactHessian,
    Bfgs,
    GradientDescent,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::NewtonExactHessian => "newton",
            Self::Bfgs => "bfgs",
            Self::GradientDescent => "gradient-descent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "newton" | "newton-exact-hessian" | "hessian" => Some(Self::NewtonExactHessian),
            "bfgs" | "gradient" => Some(Self::Bfgs),
            "gradient-descent" | "gd" => Some(Self::GradientDescent),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintStyle {
    Barrier,
    Penalty,
    None,
}

/// How Newton mode turns an indefinite or singular Newton matrix into a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianModification {
    /// Step `-(H + lambda 1)^-1 g` with `lambda >= max(0, -lambda_min)`
    /// chosen so the step fits a trust radius that adapts to how well the
    /// quadratic model predicted the last step.
    TrustRegion,
    /// Line search along the direction with every eigenvalue replaced by
    /// its magnitude (floored).
    Absolute,
    /// Line search along the direction for `H + (|lambda_min| + 1e-8) 1`.
    Shift,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    pub initial_mu: f64,
    /// Factor applied to `mu` at each reduction, in `(0, 1)`.
    pub reduction: f64,
    /// Fraction-to-boundary parameter `tau`, in `(0, 1)`.
    pub fraction_to_boundary: f64,
    /// `mu` is not reduced below this.
    pub final_mu: f64,
    /// Inner problem is solved once `|grad merit|_inf <= kappa * mu`.
    pub kappa: f64,
}

impl Default for BarrierParams {
    fn default() -> Self {
        Self { initial_mu: 1e-2, reduction: 0.2, fraction_to_boundary: 0.995, final_mu: 1e-11, kappa: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub mode: Mode,
    pub constraint_style: ConstraintStyle,
    pub optimality_tol: f64,
    pub step_tol: f64,
    pub max_iterations: usize,
    pub penalty_sigma: f64,
    /// Step length for [`Mode::GradientDescent`].
    pub fixed_step: f64,
    pub barrier: BarrierParams,
    pub line_search: LineSearchParams,
    pub modification: HessianModification,
    /// Starting trust radius (Euclidean) for [`HessianModification::TrustRegion`].
    pub initial_radius: f64,
    /// BFGS updates with `y.s <= tol |s| |y|` are skipped.
    pub curvature_skip_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            mode: Mode::NewtonExactHessian,
            constraint_style: ConstraintStyle::Barrier,
            optimality_tol: 1e-9,
            step_tol: 1e-10,
            max_iterations: 1000,
            penalty_sigma: 1e5,
            fixed_step: 0.1,
            barrier: BarrierParams::default(),
            line_search: LineSearchParams::default(),
            modification: HessianModification::Absolute,
            initial_radius: 1.0,
            curvature_skip_tol: 1e-12,
        }
    }
}

impl OptimizerConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if !(self.optimality_tol > 0.0) || !(self.step_tol > 0.0) {
            return bad("tolerances must be > 0");
        }
        if !(self.penalty_sigma > 0.0) {
            return bad("penalty_sigma must be > 0");
        }
        if !(self.initial_radius > 0.0 && self.initial_radius.is_finite()) {
            return bad("initial_radius must be > 0");
        }
        if self.mode == Mode::GradientDescent && !(self.fixed_step > 0.0) {
            return bad("fixed_step must be > 0");
        }
        let b = &self.barrier;
        if !(b.fraction_to_boundary > 0.0 && b.fraction_to_boundary < 1.0) {
            return bad("fraction_to_boundary must lie in (0, 1)");
        }
        if !(b.reduction > 0.0 && b.reduction < 1.0) {
            return bad("barrier reduction must lie in (0, 1)");
        }
        if !(b.initial_mu > 0.0 && b.final_mu > 0.0 && b.kappa > 0.0) {
            return bad("barrier parameters must be > 0");
        }
        self.line_search.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Optimality,
    Step,
    MaxIterations,
    LineSearchFailure,
    Divergence,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Self::Optimality => "optimality",
            Self::Step => "step",
            Self::MaxIterations => "max-iter",
            Self::LineSearchFailure => "line-search-failure",
            Self::Divergence => "divergence",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvaluationCounts {
    /// Objective value evaluations (every evaluation computes the value).
    pub value: usize,
    pub gradient: usize,
    pub hessian: usize,
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub value: f64,
    /// Barrier merit function (equal to `value` when no barrier is active).
    pub merit: f64,
    pub mu: f64,
    pub step_norm: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizationReport {
    pub x: DVector<f64>,
    pub value: f64,
    /// Starting point after any clipping into the box.
    pub start: DVector<f64>,
    /// Whether the given start had to be moved into the box interior.
    pub clipped_start: bool,
    pub history: Vec<IterationRecord>,
    pub evaluations: EvaluationCounts,
    pub termination: Termination,
    pub wall_time: Duration,
}

impl OptimizationReport {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

/// Counts evaluations by order.
pub(crate) struct Counting<'a, O: ?Sized> {
    inner: &'a O,
    value: Cell<usize>,
    gradient: Cell<usize>,
    hessian: Cell<usize>,
}

impl<'a, O: Objective + ?Sized> Counting<'a, O> {
    pub(crate) fn new(inner: &'a O) -> Self {
        Self { inner, value: Cell::new(0), gradient: Cell::new(0), hessian: Cell::new(0) }
    }

    /// Evaluate; `new_point` is false when the value at `x` was already
    /// counted (derivatives requested after a line search accepted `x`).
    pub(crate) fn eval(&self, x: &DVector<f64>, order: Order, new_point: bool) -> Result<Evaluation> {
        if new_point {
            self.value.set(self.value.get() + 1);
        }
        if order >= Order::Gradient {
            self.gradient.set(self.gradient.get() + 1);
        }
        if order == Order::Hessian {
            self.hessian.set(self.hessian.get() + 1);
        }
        let e = self.inner.evaluate(x, order)?;
        if !e.is_finite() {
            return Err(Error::NonFinite("objective evaluation"));
        }
        if order >= Order::Gradient && e.gradient.is_none() || order == Order::Hessian && e.hessian.is_none() {
            return Err(Error::MissingDerivatives);
        }
        Ok(e)
    }

    pub(crate) fn counts(&self) -> EvaluationCounts {
        EvaluationCounts { value: self.value.get(), gradient: self.gradient.get(), hessian: self.hessian.get() }
    }
}

/// Minimize `objective` from `x0` subject to `bounds`.
///
/// Dispatches on `cfg.constraint_style` (barrier, quadratic penalty, or
/// none) and `cfg.mode`. Gradient-descent mode ignores the bounds.
pub fn minimize<O: Objective + ?Sized>(
    objective: &O,
    x0: &DVector<f64>,
    bounds: &Bounds,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    cfg.validate()?;
    let n = objective.num_params();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { context: "initial point", expected: n, found: x0.len() });
    }
    if bounds.len() != n {
        return Err(Error::DimensionMismatch { context: "bounds", expected: n, found: bounds.len() });
    }
    if cfg.mode == Mode::GradientDescent {
        return gradient_descent_fixed(objective, x0, cfg);
    }
    match cfg.constraint_style {
        ConstraintStyle::Barrier => barrier::interior_point(objective, x0, bounds, cfg),
        ConstraintStyle::None => barrier::interior_point(objective, x0, &Bounds::unbounded(n), cfg),
        ConstraintStyle::Penalty => {
            let wrapped = PenaltyObjective::new(objective, bounds.clone(), cfg.penalty_sigma)?;
            let mut report = barrier::interior_point(&wrapped, x0, &Bounds::unbounded(n), cfg)?;
            // Report the unpenalized objective at the final point.
            report.value = objective.evaluate(&report.x, Order::Value)?.value;
            Ok(report)
        }
    }
}
