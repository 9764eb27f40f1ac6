//! Forward-mode differentiation and the SQP stack used by the MPC.

pub mod dual;
pub mod qp;
pub mod sqp;

pub use dual::{jacobian, try_jacobian, Dual, JacobianError, Real};
pub use qp::{solve_qp, LinearInequalities, QpError, QpProblem, QpSolution};
pub use sqp::{EvalError, Evaluation, Linearization, NlpProblem, SolveResult, SolveStatus, SqpOptions, SqpSolver};
