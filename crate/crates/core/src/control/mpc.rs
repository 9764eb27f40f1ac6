//! Multiple-shooting tracking MPC solved with the Gauss-Newton SQP.
//!
//! Decision vector layout: `[z_0, u_0, z_1, u_1, …, z_{N-1}, u_{N-1}, z_N]`
//! with `z = [v, s, y, θˢ]` and `u = [a_t, γ]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::nlp::dual::{try_jacobian, Dual};
use crate::nlp::{EvalError, Evaluation, LinearInequalities, Linearization, NlpProblem, SolveStatus, SqpOptions, SqpSolver};
use crate::surfaces::RoadSurface;
use crate::vehicle::{rk4_step, ControlInput, NonplanarModel, PlanarModel, VehicleModel, VehicleParams, VehicleState};

use super::ConfigError;

const NZ: usize = 4;
const NU: usize = 2;
const STAGE: usize = NZ + NU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MpcModel {
    #[default]
    Nonplanar,
    Planar,
}

/// Per-step quadratic weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MpcWeights {
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub accel_rate: f64,
    pub steer_rate: f64,
}

impl Default for MpcWeights {
    fn default() -> Self {
        Self { y: 10.0, theta: 5.0, v: 1.0, accel_rate: 0.5, steer_rate: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MpcConfig {
    pub horizon: usize,
    pub dt: f64,
    pub weights: MpcWeights,
    pub v_ref: f64,
    pub model: MpcModel,
    /// Optional per-step bounds on `|Δa_t|` and `|Δγ|`.
    pub rate_limits: Option<[f64; 2]>,
    #[serde(skip)]
    pub sqp: SqpOptions,
}

impl Default for MpcConfig {
    fn default() -> Self {
        Self {
            horizon: 20,
            dt: 0.05,
            weights: MpcWeights::default(),
            v_ref: 10.0,
            model: MpcModel::Nonplanar,
            rate_limits: None,
            sqp: SqpOptions::default(),
        }
    }
}

impl MpcConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let w = &self.weights;
        if self.horizon < 2 {
            return Err(ConfigError("MPC horizon must be at least 2".into()));
        }
        if !(self.dt > 0.0) {
            return Err(ConfigError("MPC step must be positive".into()));
        }
        if [w.y, w.theta, w.v, w.accel_rate, w.steer_rate].iter().any(|x| !(*x >= 0.0)) {
            return Err(ConfigError("MPC weights must be non-negative".into()));
        }
        if w.y + w.theta + w.v <= 0.0 {
            return Err(ConfigError("at least one MPC state weight must be positive".into()));
        }
        if let Some(r) = self.rate_limits {
            if !(r[0] > 0.0 && r[1] > 0.0) {
                return Err(ConfigError("MPC rate limits must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        STAGE * self.horizon + NZ
    }
}

/// The horizon NLP for one control tick.
pub struct MpcProblem<M> {
    model: M,
    horizon: usize,
    dt: f64,
    weights: MpcWeights,
    v_ref: f64,
    initial: [f64; 4],
    previous: [f64; 2],
    lower: Vec<f64>,
    upper: Vec<f64>,
    rates: Option<LinearInequalities>,
    residual_jacobian: DMatrix<f64>,
}

fn z_at(k: usize) -> usize {
    STAGE * k
}

fn u_at(k: usize) -> usize {
    STAGE * k + NZ
}

impl<M: VehicleModel> MpcProblem<M> {
    pub fn new(model: M, params: &VehicleParams, config: &MpcConfig, initial: [f64; 4], previous: [f64; 2]) -> Self {
        let n = config.num_vars();
        let horizon = config.horizon;
        let mut lower = vec![f64::NEG_INFINITY; n];
        let mut upper = vec![f64::INFINITY; n];
        for k in 0..horizon {
            let j = u_at(k);
            lower[j] = params.accel_bounds[0];
            upper[j] = params.accel_bounds[1];
            lower[j + 1] = params.steer_bounds[0];
            upper[j + 1] = params.steer_bounds[1];
        }

        let rates = config.rate_limits.map(|lim| {
            let mut matrix = DMatrix::zeros(NU * horizon, n);
            let (mut lo, mut hi) = (Vec::new(), Vec::new());
            for k in 0..horizon {
                for i in 0..NU {
                    let row = NU * k + i;
                    matrix[(row, u_at(k) + i)] = 1.0;
                    let offset = if k == 0 {
                        previous[i]
                    } else {
                        matrix[(row, u_at(k - 1) + i)] = -1.0;
                        0.0
                    };
                    lo.push(offset - lim[i]);
                    hi.push(offset + lim[i]);
                }
            }
            LinearInequalities { matrix, lower: lo, upper: hi }
        });

        // residuals are affine in x, so their Jacobian is fixed
        let w = &config.weights;
        let state_w = [w.y.sqrt(), w.theta.sqrt(), w.v.sqrt()];
        let rate_w = [w.accel_rate.sqrt(), w.steer_rate.sqrt()];
        let mut jr = DMatrix::zeros(3 * horizon + NU * horizon, n);
        for k in 1..=horizon {
            let base = z_at(k);
            let row = 3 * (k - 1);
            jr[(row, base + 2)] = state_w[0];
            jr[(row + 1, base + 3)] = state_w[1];
            jr[(row + 2, base)] = state_w[2];
        }
        for k in 0..horizon {
            for i in 0..NU {
                let row = 3 * horizon + NU * k + i;
                jr[(row, u_at(k) + i)] = rate_w[i];
                if k > 0 {
                    jr[(row, u_at(k - 1) + i)] = -rate_w[i];
                }
            }
        }

        Self {
            model,
            horizon,
            dt: config.dt,
            weights: *w,
            v_ref: config.v_ref,
            initial,
            previous,
            lower,
            upper,
            rates,
            residual_jacobian: jr,
        }
    }

    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let w = &self.weights;
        let n = self.horizon;
        let mut r = DVector::zeros(3 * n + NU * n);
        for k in 1..=n {
            let b = z_at(k);
            r[3 * (k - 1)] = w.y.sqrt() * x[b + 2];
            r[3 * (k - 1) + 1] = w.theta.sqrt() * x[b + 3];
            r[3 * (k - 1) + 2] = w.v.sqrt() * (x[b] - self.v_ref);
        }
        let rate_w = [w.accel_rate.sqrt(), w.steer_rate.sqrt()];
        for k in 0..n {
            for i in 0..NU {
                let prev = if k == 0 { self.previous[i] } else { x[u_at(k - 1) + i] };
                r[3 * n + NU * k + i] = rate_w[i] * (x[u_at(k) + i] - prev);
            }
        }
        r
    }

    /// RK4 prediction over one step.
    pub fn step(&self, z: &[f64; 4], u: &[f64; 2]) -> Result<[f64; 4], EvalError> {
        rk4_step(|z| self.model.rates(z, u), z, self.dt).map_err(|e| EvalError(e.to_string()))
    }
}

fn stage(x: &DVector<f64>, k: usize) -> ([f64; 4], [f64; 2]) {
    let b = z_at(k);
    ([x[b], x[b + 1], x[b + 2], x[b + 3]], [x[b + 4], x[b + 5]])
}

impl<M: VehicleModel> NlpProblem for MpcProblem<M> {
    fn num_vars(&self) -> usize {
        STAGE * self.horizon + NZ
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lower.clone(), self.upper.clone())
    }

    fn linear_inequalities(&self) -> Option<&LinearInequalities> {
        self.rates.as_ref()
    }

    fn evaluate(&self, x: &DVector<f64>) -> Result<Evaluation, EvalError> {
        let n = self.horizon;
        let mut c = DVector::zeros(NZ * (n + 1));
        for i in 0..NZ {
            c[i] = x[i] - self.initial[i];
        }
        for k in 0..n {
            let (z, u) = stage(x, k);
            let next = self.step(&z, &u)?;
            for i in 0..NZ {
                c[NZ * (k + 1) + i] = x[z_at(k + 1) + i] - next[i];
            }
        }
        Ok(Evaluation { residuals: self.residuals(x), constraints: c })
    }

    fn linearize(&self, x: &DVector<f64>) -> Result<Linearization, EvalError> {
        let n = self.horizon;
        let nv = self.num_vars();
        let mut c = DVector::zeros(NZ * (n + 1));
        let mut jc = DMatrix::zeros(NZ * (n + 1), nv);
        for i in 0..NZ {
            c[i] = x[i] - self.initial[i];
            jc[(i, i)] = 1.0;
        }
        for k in 0..n {
            let b = z_at(k);
            let point: [f64; STAGE] = std::array::from_fn(|i| x[b + i]);
            let (next, jac) = try_jacobian(
                |d: &[Dual<STAGE>; STAGE]| {
                    let z = [d[0], d[1], d[2], d[3]];
                    let u = [d[4], d[5]];
                    rk4_step(|z| self.model.rates(z, &u), &z, self.dt).map(|o| o.to_vec())
                },
                &point,
            )
            .map_err(|e| EvalError(e.to_string()))?;
            for i in 0..NZ {
                let row = NZ * (k + 1) + i;
                c[row] = x[z_at(k + 1) + i] - next[i];
                jc[(row, z_at(k + 1) + i)] = 1.0;
                for j in 0..STAGE {
                    jc[(row, b + j)] = -jac[(i, j)];
                }
            }
        }
        Ok(Linearization {
            eval: Evaluation { residuals: self.residuals(x), constraints: c },
            residual_jacobian: self.residual_jacobian.clone(),
            constraint_jacobian: jc,
        })
    }
}

/// Shift a horizon solution one stage forward, repeating the last input and
/// terminal state.
pub fn warm_shift(previous: &DVector<f64>, horizon: usize) -> DVector<f64> {
    let mut out = previous.clone();
    for k in 0..horizon - 1 {
        for i in 0..STAGE {
            out[z_at(k) + i] = previous[z_at(k + 1) + i];
        }
    }
    // stage N-1 keeps its input, its state becomes the old terminal state
    for i in 0..NZ {
        out[z_at(horizon - 1) + i] = previous[z_at(horizon) + i];
    }
    out
}

/// Solver state carried between ticks.
#[derive(Debug, Clone)]
pub struct MpcWarmStart {
    pub solver: SqpSolver,
    pub guess: Option<DVector<f64>>,
    /// Last input the MPC decided (used by the first rate term).
    pub previous: ControlInput,
    /// When false every tick starts from a constant-state, zero-input guess.
    pub shift: bool,
}

impl MpcWarmStart {
    pub fn new(config: &MpcConfig) -> Self {
        Self { solver: SqpSolver::new(config.sqp), guess: None, previous: ControlInput::default(), shift: true }
    }
}

#[derive(Debug, Clone)]
pub struct MpcDiagnostics {
    pub status: SolveStatus,
    pub iterations: usize,
    pub solve_ms: f64,
    pub kkt_residual: f64,
    /// Predicted states `z_0 … z_N`.
    pub predicted: Vec<[f64; 4]>,
    pub inputs: Vec<[f64; 2]>,
    /// Whether the previous input was reused because the solve failed.
    pub fallback: bool,
}

fn cold_guess(config: &MpcConfig, z0: [f64; 4]) -> DVector<f64> {
    let mut x = DVector::zeros(config.num_vars());
    for k in 0..=config.horizon {
        for i in 0..NZ {
            x[z_at(k) + i] = z0[i];
        }
    }
    x
}

/// Solves one tick of the MPC and returns the saturated first input.
pub fn mpc_step(
    road: &RoadSurface,
    params: &VehicleParams,
    state: &VehicleState,
    config: &MpcConfig,
    warm: &mut MpcWarmStart,
) -> (ControlInput, MpcDiagnostics) {
    let z0 = state.to_array();
    let mut guess = match (&warm.guess, warm.shift) {
        (Some(g), true) if g.len() == config.num_vars() => warm_shift(g, config.horizon),
        _ => cold_guess(config, z0),
    };
    for i in 0..NZ {
        guess[i] = z0[i];
    }
    let previous = warm.previous.to_array();
    let result = match config.model {
        MpcModel::Nonplanar => {
            let p = MpcProblem::new(NonplanarModel { road, params: *params }, params, config, z0, previous);
            warm.solver.solve(&p, &guess)
        }
        MpcModel::Planar => {
            let p = MpcProblem::new(PlanarModel { road, params: *params }, params, config, z0, previous);
            warm.solver.solve(&p, &guess)
        }
    };

    let x = &result.x;
    let fallback = result.status != SolveStatus::Converged || !x.iter().all(|v| v.is_finite());
    let input = if fallback {
        warm.previous
    } else {
        let (_, u) = stage(x, 0);
        params.saturate(ControlInput::new(u[0], u[1]))
    };
    if x.iter().all(|v| v.is_finite()) {
        warm.guess = Some(x.clone());
    }
    warm.previous = input;
    let predicted = (0..=config.horizon).map(|k| std::array::from_fn(|i| x[z_at(k) + i])).collect();
    let inputs = (0..config.horizon).map(|k| stage(x, k).1).collect();
    let diag = MpcDiagnostics {
        status: result.status,
        iterations: result.iterations,
        solve_ms: result.solve_ms,
        kkt_residual: result.kkt_residual,
        predicted,
        inputs,
        fallback,
    };
    (input, diag)
}
