// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{
    bfgs_update, line_search, Bounds, Counting, Evaluation, HessianModification, IterationRecord,
    LineSearchError, Mode, Objective, OptimizationReport, OptimizerConfig, Order, Termination,
};
use crate::error::{Error, Result};

/// Largest `alpha <= 1` keeping `x + alpha p` at least a fraction `1 - tau`
/// of the current distance away from every finite bound.
pub fn fraction_to_boundary(x: &DVector<f64>, p: &DVector<f64>, bounds: &Bounds, tau: f64) -> f64 {
    let mut alpha = 1.0_f64;
    for i in 0..x.len() {
        if p[i] < 0.0 && bounds.lower[i].is_finite() {
            alpha = alpha.min(tau * (x[i] - bounds.lower[i]) / -p[i]);
        } else if p[i] > 0.0 && bounds.upper[i].is_finite() {
            alpha = alpha.min(tau * (bounds.upper[i] - x[i]) / p[i]);
        }
    }
    alpha
}

/// Move a start point strictly inside the box. Returns whether it moved.
fn interior_start(x0: &DVector<f64>, bounds: &Bounds) -> (DVector<f64>, bool) {
    let mut x = x0.clone();
    let mut moved = false;
    for i in 0..x.len() {
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let margin = if lo.is_finite() && hi.is_finite() {
            1e-3 * (hi - lo)
        } else {
            1e-3 * lo.abs().max(hi.abs()).clamp(1.0, f64::MAX)
        };
        if lo.is_finite() && x[i] <= lo {
            x[i] = lo + margin;
            moved = true;
        } else if hi.is_finite() && x[i] >= hi {
            x[i] = hi - margin;
            moved = true;
        }
    }
    (x, moved)
}

struct Barrier<'a> {
    bounds: &'a Bounds,
}

impl Barrier<'_> {
    /// `-mu sum [log(x - lo) + log(hi - x)]`, `+inf` outside the box.
    fn value(&self, x: &DVector<f64>, mu: f64) -> f64 {
        if mu == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..x.len() {
            let (lo, hi) = (self.bounds.lower[i], self.bounds.upper[i]);
            if lo.is_finite() {
                let d = x[i] - lo;
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                acc -= d.ln();
            }
            if hi.is_finite() {
                let d = hi - x[i];
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                acc -= d.ln();
            }
        }
        mu * acc
    }

    fn gradient(&self, x: &DVector<f64>, mu: f64) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| {
            let mut g = 0.0;
            if self.bounds.lower[i].is_finite() {
                g -= mu / (x[i] - self.bounds.lower[i]);
            }
            if self.bounds.upper[i].is_finite() {
                g += mu / (self.bounds.upper[i] - x[i]);
            }
            g
        })
    }

    /// Distances to the lower and upper bounds (`inf` where unbounded).
    fn distances(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (
            DVector::from_fn(x.len(), |i, _| x[i] - self.bounds.lower[i]),
            DVector::from_fn(x.len(), |i, _| self.bounds.upper[i] - x[i]),
        )
    }
}

/// Bound multiplier estimates of the primal-dual barrier method. The
/// Newton matrix uses `z / d` in place of the primal curvature `mu / d^2`,
/// which it equals on the central path `z d = mu`.
struct Duals {
    lower: DVector<f64>,
    upper: DVector<f64>,
}

/// Multipliers may drift from `mu / d` by at most this factor.
const DUAL_SAFEGUARD: f64 = 1e10;

impl Duals {
    fn central(barrier: &Barrier<'_>, x: &DVector<f64>, mu: f64) -> Self {
        let (dl, du) = barrier.distances(x);
        Self { lower: dl.map(|d| if d.is_finite() { mu / d } else { 0.0 }), upper: du.map(|d| if d.is_finite() { mu / d } else { 0.0 }) }
    }

    fn curvature(&self, barrier: &Barrier<'_>, x: &DVector<f64>) -> DVector<f64> {
        let (dl, du) = barrier.distances(x);
        DVector::from_fn(x.len(), |i, _| {
            let mut h = 0.0;
            if dl[i].is_finite() {
                h += self.lower[i] / dl[i];
            }
            if du[i].is_finite() {
                h += self.upper[i] / du[i];
            }
            h
        })
    }

    /// Newton update of the multipliers for the primal step `s` taken from `x`.
    fn update(&mut self, barrier: &Barrier<'_>, x: &DVector<f64>, s: &DVector<f64>, mu: f64, tau: f64) {
        let (dl, du) = barrier.distances(x);
        let n = x.len();
        let step_l = DVector::from_fn(n, |i, _| {
            if dl[i].is_finite() { mu / dl[i] - self.lower[i] - self.lower[i] / dl[i] * s[i] } else { 0.0 }
        });
        let step_u = DVector::from_fn(n, |i, _| {
            if du[i].is_finite() { mu / du[i] - self.upper[i] + self.upper[i] / du[i] * s[i] } else { 0.0 }
        });
        let mut alpha = 1.0_f64;
        for (z, dz) in [(&self.lower, &step_l), (&self.upper, &step_u)] {
            for i in 0..n {
                if dz[i] < 0.0 && z[i] > 0.0 {
                    alpha = alpha.min(tau * z[i] / -dz[i]);
                }
            }
        }
        self.lower += step_l * alpha;
        self.upper += step_u * alpha;
        let (dl, du) = barrier.distances(&(x + s));
        for (z, d) in [(&mut self.lower, &dl), (&mut self.upper, &du)] {
            for i in 0..n {
                if d[i].is_finite() {
                    let central = mu / d[i];
                    z[i] = z[i].clamp(central / DUAL_SAFEGUARD, central * DUAL_SAFEGUARD);
                }
            }
        }
    }
}

/// Solve `H p = -g` after making `H` positive definite (used with a line search).
pub(crate) fn modified_newton_direction(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    modification: HessianModification,
) -> DVector<f64> {
    if let Some(chol) = h.clone().cholesky() {
        let p = chol.solve(&-g);
        if p.iter().all(|v| v.is_finite()) {
            return p;
        }
    }
    let eig = SymmetricEigen::new(h.clone());
    let scale = eig.eigenvalues.amax().max(1.0);
    let floor = 1e-8 * scale;
    let lambda_min = eig.eigenvalues.min();
    let modified: DVector<f64> = match modification {
        HessianModification::Shift => {
            let shift = if lambda_min <= 0.0 { lambda_min.abs() + 1e-8 } else { 0.0 };
            eig.eigenvalues.map(|l| (l + shift).max(floor))
        }
        HessianModification::Absolute | HessianModification::TrustRegion => {
            eig.eigenvalues.map(|l| l.abs().max(floor))
        }
    };
    let v = &eig.eigenvectors;
    let coeff = (v.transpose() * g).component_div(&modified);
    -(v * coeff)
}

/// Minimizer of `g.p + p.H.p / 2` over `|p| <= radius`, from the
/// eigendecomposition of `H`.
pub(crate) struct TrustStep {
    pub step: DVector<f64>,
    /// The step stopped at the trust radius rather than at the Newton point.
    pub on_boundary: bool,
}

pub(crate) fn trust_region_step(h: &DMatrix<f64>, g: &DVector<f64>, radius: f64) -> TrustStep {
    let eig = SymmetricEigen::new(h.clone());
    let lambda = &eig.eigenvalues;
    let v = &eig.eigenvectors;
    let gh = v.transpose() * g;
    let lambda_min = lambda.min();
    let norm_at = |sigma: f64| {
        gh.iter().zip(lambda.iter()).map(|(gi, li)| (gi / (li + sigma)).powi(2)).sum::<f64>().sqrt()
    };
    let step_at = |sigma: f64| -(v * gh.zip_map(lambda, |gi, li| gi / (li + sigma)));

    let scale = lambda.amax().max(1e-300);
    if lambda_min > 1e-14 * scale && norm_at(0.0) <= radius {
        return TrustStep { step: step_at(0.0), on_boundary: false };
    }

    // |p(sigma)| decreases on (sigma_lo, inf); bracket the root of |p| = radius.
    let sigma_lo = (-lambda_min).max(0.0);
    let mut lo = sigma_lo;
    let mut hi = sigma_lo + g.norm() / radius + 1e-300;
    let tiny = 1e-12 * (scale + sigma_lo);
    if norm_at(sigma_lo + tiny) < radius {
        // Hard case: the gradient has (almost) no weight on the lowest
        // eigenvectors. Complete the shifted step along the lowest one.
        let sigma = sigma_lo + tiny;
        let p = step_at(sigma);
        let rest = (radius * radius - p.norm_squared()).max(0.0).sqrt();
        let imin = lambda.imin();
        let dir = v.column(imin).into_owned();
        let sign = if dir.dot(g) > 0.0 { -1.0 } else { 1.0 };
        return TrustStep { step: p + dir * (sign * rest), on_boundary: true };
    }
    let mut sigma = hi;
    for _ in 0..200 {
        sigma = 0.5 * (lo + hi);
        let n = norm_at(sigma);
        if (n - radius).abs() <= 1e-10 * radius {
            break;
        }
        if n > radius {
            lo = sigma;
        } else {
            hi = sigma;
        }
    }
    TrustStep { step: step_at(sigma), on_boundary: true }
}

fn quadratic_decrease(h: &DMatrix<f64>, g: &DVector<f64>, s: &DVector<f64>) -> f64 {
    -(g.dot(s) + 0.5 * s.dot(&(h * s)))
}

pub(crate) fn interior_point<O: Objective + ?Sized>(
    objective: &O,
    x0: &DVector<f64>,
    bounds: &Bounds,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    let started = Instant::now();
    let counting = Counting::new(objective);
    let n = objective.num_params();
    let barrier = Barrier { bounds };
    let active = bounds.has_finite();
    let params = &cfg.barrier;
    let order = match cfg.mode {
        Mode::NewtonExactHessian => Order::Hessian,
        Mode::Bfgs => Order::Gradient,
        Mode::GradientDescent => {
            return Err(Error::InvalidConfig("gradient descent is not an interior-point mode".into()))
        }
    };
    let trust = cfg.mode == Mode::NewtonExactHessian && cfg.modification == HessianModification::TrustRegion;

    let (start, clipped_start) = if active { interior_start(x0, bounds) } else { (x0.clone(), false) };
    let mut x = start.clone();
    let mut mu = if active { params.initial_mu } else { 0.0 };
    let mut eval: Evaluation = counting.eval(&x, order, true)?;
    let mut duals = Duals::central(&barrier, &x, mu);
    let mut b_approx = DMatrix::<f64>::identity(n, n);
    let mut radius = cfg.initial_radius;
    let mut history = Vec::new();
    let mut attempts = 0usize;
    let reduce = |mu: f64| (mu * params.reduction).max(params.final_mu);

    let termination = loop {
        let g = eval.gradient.as_ref().expect("gradient requested");
        if bounds.projected_gradient_norm(&x, g) <= cfg.optimality_tol {
            break Termination::Optimality;
        }
        let merit_grad = g + barrier.gradient(&x, mu);
        if active && mu > params.final_mu && merit_grad.amax() <= params.kappa * mu {
            mu = reduce(mu);
            continue;
        }
        if history.len() >= cfg.max_iterations || attempts >= 10 * cfg.max_iterations.max(1) {
            break Termination::MaxIterations;
        }
        attempts += 1;

        let mut h = match cfg.mode {
            Mode::NewtonExactHessian => eval.hessian.clone().expect("hessian requested"),
            _ => b_approx.clone(),
        };
        if active {
            let curv = duals.curvature(&barrier, &x);
            for i in 0..n {
                h[(i, i)] += curv[i];
            }
        }
        let merit0 = eval.value + barrier.value(&x, mu);

        let (x_new, merit_new) = if trust {
            if history.is_empty() && attempts == 1 {
                // Let the first trial be the full Newton step when that is well defined.
                if let Some(chol) = h.clone().cholesky() {
                    radius = radius.max(chol.solve(&merit_grad).norm() * (1.0 + 1e-8));
                }
            }
            let TrustStep { step: p, on_boundary } = trust_region_step(&h, &merit_grad, radius);
            let alpha = if active { fraction_to_boundary(&x, &p, bounds, params.fraction_to_boundary) } else { 1.0 };
            let s = &p * alpha;
            let predicted = quadratic_decrease(&h, &merit_grad, &s);
            let trial = &x + &s;
            let b = barrier.value(&trial, mu);
            let merit = if b.is_finite() { counting.eval(&trial, Order::Value, true)?.value + b } else { f64::INFINITY };
            let actual = merit0 - merit;
            let rho = if predicted > 0.0 { actual / predicted } else { -1.0 };
            let s_norm = s.norm();
            if rho < 0.25 {
                radius = 0.25 * s_norm;
            } else if rho > 0.75 && on_boundary && alpha == 1.0 {
                radius = (2.0 * radius).min(1e4 * cfg.initial_radius);
            }
            if !(rho >= 1e-4 && actual > 0.0) {
                if radius <= cfg.step_tol {
                    if active && mu > params.final_mu {
                        mu = reduce(mu);
                        radius = cfg.initial_radius;
                        continue;
                    }
                    break Termination::Step;
                }
                continue;
            }
            (trial, merit)
        } else {
            let mut p = modified_newton_direction(&h, &merit_grad, cfg.modification);
            if !(merit_grad.dot(&p) < 0.0) {
                p = -&merit_grad;
            }
            let alpha0 = if active { fraction_to_boundary(&x, &p, bounds, params.fraction_to_boundary) } else { 1.0 };
            let search = line_search(
                |trial| {
                    let b = barrier.value(trial, mu);
                    if !b.is_finite() {
                        return Ok(f64::INFINITY);
                    }
                    Ok(counting.eval(trial, Order::Value, true)?.value + b)
                },
                &x,
                &p,
                &merit_grad,
                merit0,
                alpha0,
                &cfg.line_search,
            );
            match search {
                Ok(step) => (&x + &p * step.alpha, step.value),
                Err(LineSearchError::Objective(e)) => return Err(e),
                Err(_) if active && mu > params.final_mu => {
                    mu = reduce(mu);
                    continue;
                }
                Err(_) => break Termination::LineSearchFailure,
            }
        };

        let eval_new = counting.eval(&x_new, order, false)?;
        let s = &x_new - &x;
        if cfg.mode == Mode::Bfgs {
            let y = eval_new.gradient.as_ref().expect("gradient requested") - g;
            b_approx = bfgs_update(&b_approx, &s, &y, cfg.curvature_skip_tol)?.matrix;
        }
        if active {
            duals.update(&barrier, &x, &s, mu, params.fraction_to_boundary);
        }
        let step_norm = s.amax();
        history.push(IterationRecord { value: eval_new.value, merit: merit_new, mu, step_norm });
        x = x_new;
        eval = eval_new;

        if step_norm <= cfg.step_tol {
            if active && mu > params.final_mu {
                mu = reduce(mu);
            } else {
                break Termination::Step;
            }
        }
    };

    Ok(OptimizationReport {
        value: eval.value,
        x,
        start,
        clipped_start,
        history,
        evaluations: counting.counts(),
        termination,
        wall_time: started.elapsed(),
    })
}
