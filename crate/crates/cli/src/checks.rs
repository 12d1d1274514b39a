// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-difference check of the analytical derivatives, and the two-level
//! trap demonstration.

use std::f64::consts::PI;

use hessgrape::models::{two_level_example, TWO_LEVEL_DEMO_BOUND, TWO_LEVEL_DEMO_START};
use hessgrape::objective::ControlBound;
use hessgrape::optimize::{minimize, Bounds, Mode, Objective, OptimizerConfig, Order, SeedSpec, Termination};
use nalgebra::{DMatrix, DVector};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const GRADIENT_TOL: f64 = 1e-6;
pub const HESSIAN_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeCheck {
    pub duration: f64,
    pub params: usize,
    /// `max |analytic - fd| / max |fd|`.
    pub gradient_error: f64,
    pub hessian_error: f64,
    pub hessian_asymmetry: f64,
}

impl DerivativeCheck {
    pub fn passed(&self) -> bool {
        self.gradient_error <= GRADIENT_TOL && self.hessian_error <= HESSIAN_TOL && self.hessian_asymmetry == 0.0
    }
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

/// Compare the analytical gradient and Hessian with central differences at
/// a random pulse (seeded by `base_seed`) for each configured duration.
pub fn check_derivatives(cfg: &ExperimentConfig) -> Result<Vec<DerivativeCheck>, CliError> {
    let mut out = Vec::new();
    for &duration in &cfg.durations {
        let problem = cfg.problem(duration)?;
        let obj = problem.objective()?.with_backend(cfg.backend.propagator());
        let x = SeedSpec::new(cfg.base_seed)
            .initial_point(&problem.optimizer_bounds())
            .or_else(|_| SeedSpec::new(cfg.base_seed).initial_point(&Bounds::uniform(obj.num_params(), -1.0, 1.0)?))?;
        let e = obj.evaluate(&x, Order::Hessian)?;
        let g = e.gradient.expect("gradient requested");
        let h = e.hessian.expect("Hessian requested");
        let n = x.len();
        let mut fd_g = DVector::zeros(n);
        let mut fd_h = DMatrix::zeros(n, n);
        for i in 0..n {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += FD_STEP;
            xm[i] -= FD_STEP;
            let (ep, em) = (obj.evaluate(&xp, Order::Gradient)?, obj.evaluate(&xm, Order::Gradient)?);
            fd_g[i] = (ep.value - em.value) / (2.0 * FD_STEP);
            fd_h.set_column(i, &((ep.gradient.unwrap() - em.gradient.unwrap()) / (2.0 * FD_STEP)));
        }
        out.push(DerivativeCheck {
            duration,
            params: n,
            gradient_error: rel_err(g.as_slice(), fd_g.as_slice()),
            hessian_error: rel_err(h.as_slice(), fd_h.as_slice()),
            hessian_asymmetry: (&h - h.transpose()).amax(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoRun {
    pub mode: Mode,
    pub x: Vec<f64>,
    pub infidelity: f64,
    pub iterations: usize,
    pub value_evaluations: usize,
    pub termination: Termination,
}

/// `H = sigma_x + c(t) sigma_z`, target `sigma_x`, `T = 3 pi / 2` in two
/// steps, all modes from the same start.
pub fn demo_two_level() -> Result<Vec<DemoRun>, CliError> {
    let p = two_level_example(1.5 * PI, 2)?.with_bounds(vec![ControlBound::symmetric(TWO_LEVEL_DEMO_BOUND)?])?;
    let obj = p.objective()?;
    let x0 = DVector::from_row_slice(&TWO_LEVEL_DEMO_START);
    [Mode::NewtonExactHessian, Mode::Bfgs, Mode::GradientDescent]
        .into_iter()
        .map(|mode| {
            let r = minimize(&obj, &x0, &p.optimizer_bounds(), &OptimizerConfig::default().with_mode(mode))?;
            Ok(DemoRun {
                mode,
                x: r.x.as_slice().to_vec(),
                infidelity: r.value,
                iterations: r.iterations(),
                value_evaluations: r.evaluations.value,
                termination: r.termination,
            })
        })
        .collect()
}
