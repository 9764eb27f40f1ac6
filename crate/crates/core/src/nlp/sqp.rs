//! Gauss-Newton SQP for least-squares problems with equality constraints,
//! simple bounds and linear inequalities.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::qp::{solve_qp, LinearInequalities, QpProblem};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct EvalError(pub String);

/// Residuals `r(x)` of the cost `½‖r‖²` and equality constraints `c(x) = 0`.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub residuals: DVector<f64>,
    pub constraints: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Linearization {
    pub eval: Evaluation,
    pub residual_jacobian: DMatrix<f64>,
    pub constraint_jacobian: DMatrix<f64>,
}

pub trait NlpProblem {
    fn num_vars(&self) -> usize;
    /// Lower and upper bounds on `x` (infinite entries allowed).
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    /// Optional `lower ≤ C x ≤ upper` rows.
    fn linear_inequalities(&self) -> Option<&LinearInequalities> {
        None
    }
    fn evaluate(&self, x: &DVector<f64>) -> Result<Evaluation, EvalError>;
    fn linearize(&self, x: &DVector<f64>) -> Result<Linearization, EvalError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    LineSearchFailure,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIterations => "max_iterations",
            Self::LineSearchFailure => "line_search_failure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub x: DVector<f64>,
    /// Accepted steps.
    pub iterations: usize,
    pub kkt_residual: f64,
    pub cost: f64,
    pub solve_ms: f64,
    /// Merit before and after each accepted step, both at the penalty used
    /// for that step's line search.
    pub merit_steps: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqpOptions {
    pub max_iterations: usize,
    pub kkt_tol: f64,
    pub initial_damping: f64,
    pub min_damping: f64,
    pub armijo: f64,
    pub min_step: f64,
}

impl Default for SqpOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            kkt_tol: 1e-6,
            initial_damping: 1e-8,
            min_damping: 1e-10,
            armijo: 1e-4,
            min_step: 1e-8,
        }
    }
}

fn merit(e: &Evaluation, penalty: f64) -> f64 {
    let v = 0.5 * e.residuals.norm_squared() + penalty * e.constraints.lp_norm(1);
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Reusable solver; holds only the damping carried between warm starts.
#[derive(Debug, Clone)]
pub struct SqpSolver {
    pub options: SqpOptions,
    damping: f64,
}

impl SqpSolver {
    pub fn new(options: SqpOptions) -> Self {
        Self { options, damping: options.initial_damping }
    }

    pub fn solve(&mut self, problem: &dyn NlpProblem, x0: &DVector<f64>) -> SolveResult {
        let start = Instant::now();
        let opts = self.options;
        let (lower, upper) = problem.bounds();
        let n = problem.num_vars();
        let mut x = DVector::from_iterator(n, (0..n).map(|i| x0[i].clamp(lower[i], upper[i])));
        let ineq = problem.linear_inequalities();
        let mut penalty = 1.0;
        let mut mu = self.damping.max(opts.min_damping);
        let mut iterations = 0;
        let mut history = Vec::new();
        let mut kkt = f64::INFINITY;

        let finish = |status, x: DVector<f64>, iterations, kkt, history: Vec<[f64; 2]>, cost| SolveResult {
            status,
            x,
            iterations,
            kkt_residual: kkt,
            cost,
            solve_ms: start.elapsed().as_secs_f64() * 1e3,
            merit_steps: history,
        };

        for _ in 0..=opts.max_iterations {
            let lin = match problem.linearize(&x) {
                Ok(l) => l,
                Err(_) => return finish(SolveStatus::LineSearchFailure, x, iterations, kkt, history, f64::INFINITY),
            };
            let r = &lin.eval.residuals;
            let c = &lin.eval.constraints;
            let jr = &lin.residual_jacobian;
            let jc = &lin.constraint_jacobian;
            let cost = 0.5 * r.norm_squared();
            let grad = jr.transpose() * r;
            let gn = jr.transpose() * jr;

            let mut hessian = gn.clone();
            for i in 0..n {
                hessian[(i, i)] += mu;
            }
            let lo: Vec<f64> = (0..n).map(|i| lower[i] - x[i]).collect();
            let hi: Vec<f64> = (0..n).map(|i| upper[i] - x[i]).collect();
            let shifted = ineq.map(|q| {
                let cx = &q.matrix * &x;
                LinearInequalities {
                    matrix: q.matrix.clone(),
                    lower: q.lower.iter().zip(cx.iter()).map(|(l, v)| l - v).collect(),
                    upper: q.upper.iter().zip(cx.iter()).map(|(u, v)| u - v).collect(),
                }
            });
            let neg_c = -c;
            let qp = QpProblem {
                hessian: &hessian,
                gradient: &grad,
                equality: if c.is_empty() { None } else { Some((jc, &neg_c)) },
                lower: &lo,
                upper: &hi,
                inequality: shifted.as_ref(),
            };
            let sol = match solve_qp(&qp) {
                Ok(s) => s,
                Err(e) => {
                    log::debug!("QP subproblem failed: {e}");
                    return finish(SolveStatus::LineSearchFailure, x, iterations, kkt, history, cost);
                }
            };
            let d = sol.x;
            let c_inf = c.amax();
            kkt = (&hessian * &d).amax().max(c_inf);
            if kkt <= opts.kkt_tol {
                self.damping = mu;
                return finish(SolveStatus::Converged, x, iterations, kkt, history, cost);
            }
            if iterations == opts.max_iterations {
                break;
            }

            let lam = sol.equality_multipliers.amax();
            if lam.is_finite() && penalty < 1.5 * lam {
                penalty = 2.0 * lam;
            }
            let phi0 = merit(&lin.eval, penalty);
            let c1 = c.lp_norm(1);
            let slope = grad.dot(&d) - penalty * c1;
            let model_drop = -(slope + 0.5 * d.dot(&(&gn * &d)));

            let mut alpha = 1.0;
            let mut accepted = None;
            while alpha >= opts.min_step {
                let trial = &x + &d * alpha;
                let phi = problem.evaluate(&trial).map(|e| merit(&e, penalty)).unwrap_or(f64::INFINITY);
                if phi <= phi0 + opts.armijo * alpha * slope.min(0.0) && phi <= phi0 {
                    accepted = Some((trial, phi));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((trial, phi)) = accepted else {
                self.damping = mu;
                return finish(SolveStatus::LineSearchFailure, x, iterations, kkt, history, cost);
            };
            // Levenberg damping from the full-step agreement between merit and model
            let ratio = if alpha == 1.0 && model_drop > 0.0 { (phi0 - phi) / model_drop } else { 0.0 };
            mu = if ratio > 0.75 {
                (mu / 3.0).max(opts.min_damping)
            } else if ratio < 0.25 {
                (mu * 4.0).min(1e6)
            } else {
                mu
            };
            for i in 0..n {
                x[i] = trial[i].clamp(lower[i], upper[i]);
            }
            iterations += 1;
            history.push([phi0, phi]);
        }
        self.damping = mu;
        let cost = problem.evaluate(&x).map(|e| 0.5 * e.residuals.norm_squared()).unwrap_or(f64::INFINITY);
        finish(SolveStatus::MaxIterations, x, iterations, kkt, history, cost)
    }
}
