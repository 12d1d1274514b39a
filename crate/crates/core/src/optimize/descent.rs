// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use nalgebra::DVector;

use super::{Counting, IterationRecord, Objective, OptimizationReport, OptimizerConfig, Order, Termination};
use crate::error::Result;

/// Consecutive increases of the objective after which the run is declared divergent.
const DIVERGENCE_PATIENCE: usize = 10;

/// Unconstrained fixed-step descent `x <- x - cfg.fixed_step * grad J(x)`.
///
/// No line search and no bounds. Stops on the gradient norm, a tiny step,
/// the iteration cap, or [`Termination::Divergence`].
pub fn gradient_descent_fixed<O: Objective + ?Sized>(
    objective: &O,
    x0: &DVector<f64>,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    cfg.validate()?;
    let started = Instant::now();
    let counting = Counting::new(objective);
    let mut x = x0.clone();
    let mut eval = counting.eval(&x, Order::Gradient, true)?;
    let mut history = Vec::new();
    let mut increases = 0;

    let termination = loop {
        let g = eval.gradient.as_ref().expect("gradient requested");
        if g.amax() <= cfg.optimality_tol {
            break Termination::Optimality;
        }
        if history.len() >= cfg.max_iterations {
            break Termination::MaxIterations;
        }
        let step = g * cfg.fixed_step;
        let x_new = &x - &step;
        let eval_new = counting.eval(&x_new, Order::Gradient, true)?;
        increases = if eval_new.value > eval.value { increases + 1 } else { 0 };
        let step_norm = step.amax();
        history.push(IterationRecord { value: eval_new.value, merit: eval_new.value, mu: 0.0, step_norm });
        x = x_new;
        eval = eval_new;
        if increases >= DIVERGENCE_PATIENCE {
            break Termination::Divergence;
        }
        if step_norm <= cfg.step_tol {
            break Termination::Step;
        }
    };

    Ok(OptimizationReport {
        value: eval.value,
        start: x0.clone(),
        x,
        clipped_start: false,
        history,
        evaluations: counting.counts(),
        termination,
        wall_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::{Evaluation, Mode};

    struct Parabola(f64);

    impl Objective for Parabola {
        fn num_params(&self) -> usize {
            1
        }
        fn evaluate(&self, x: &DVector<f64>, _o: Order) -> Result<Evaluation> {
            Ok(Evaluation {
                value: 0.5 * self.0 * x[0] * x[0],
                gradient: Some(DVector::from_element(1, self.0 * x[0])),
                hessian: None,
            })
        }
    }

    #[test]
    fn converges_with_small_step() {
        // f = x^2 contracts by 1 - 2 * 0.4 per step
        let cfg = OptimizerConfig { fixed_step: 0.4, ..OptimizerConfig::default().with_mode(Mode::GradientDescent) };
        let r = gradient_descent_fixed(&Parabola(2.0), &DVector::from_element(1, 1.0), &cfg).unwrap();
        assert_eq!(r.termination, Termination::Optimality);
        assert!(r.x[0].abs() <= 1e-6);
        for w in r.history.windows(2) {
            assert!((w[1].value.sqrt() - 0.2 * w[0].value.sqrt()).abs() < 1e-15);
        }
        assert_eq!(r.evaluations.hessian, 0);
    }

    #[test]
    fn detects_divergence() {
        let cfg = OptimizerConfig { fixed_step: 1.5, ..OptimizerConfig::default().with_mode(Mode::GradientDescent) };
        let r = gradient_descent_fixed(&Parabola(2.0), &DVector::from_element(1, 1.0), &cfg).unwrap();
        assert_eq!(r.termination, Termination::Divergence);
        assert_eq!(r.iterations(), DIVERGENCE_PATIENCE);
    }
}
