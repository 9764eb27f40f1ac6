//! The SQP solver on Rosenbrock's function written as two residuals, first in
//! a loose box and then with `x₀ ≤ 0.5` so the bound is active at the answer.
//!
//! ```text
//! cargo run --example sqp_rosenbrock
//! ```

use nalgebra::{DMatrix, DVector};
use nonplanar::nlp::{EvalError, Evaluation, Linearization, NlpProblem, SqpOptions, SqpSolver};

struct Rosenbrock {
    upper0: f64,
}

impl NlpProblem for Rosenbrock {
    fn num_vars(&self) -> usize {
        2
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-2.0, -1.0], vec![self.upper0, 3.0])
    }
    fn evaluate(&self, x: &DVector<f64>) -> Result<Evaluation, EvalError> {
        Ok(Evaluation {
            residuals: DVector::from_vec(vec![1.0 - x[0], 10.0 * (x[1] - x[0] * x[0])]),
            constraints: DVector::zeros(0),
        })
    }
    fn linearize(&self, x: &DVector<f64>) -> Result<Linearization, EvalError> {
        Ok(Linearization {
            eval: self.evaluate(x)?,
            residual_jacobian: DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, -20.0 * x[0], 10.0]),
            constraint_jacobian: DMatrix::zeros(0, 2),
        })
    }
}

fn main() {
    let mut solver = SqpSolver::new(SqpOptions::default());
    for upper0 in [2.0, 0.5] {
        let res = solver.solve(&Rosenbrock { upper0 }, &DVector::from_vec(vec![-1.2, 1.0]));
        println!(
            "x₀ ≤ {upper0}: {} after {} iterations, x = ({:.8}, {:.8}), cost {:.3e}, KKT {:.1e}",
            res.status.as_str(),
            res.iterations,
            res.x[0],
            res.x[1],
            res.cost,
            res.kkt_residual
        );
        for (k, [before, after]) in res.merit_steps.iter().enumerate() {
            println!("  step {k:2}: merit {before:.6e} -> {after:.6e}");
        }
    }
}
