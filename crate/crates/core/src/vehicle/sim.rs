//! Closed-loop simulation: a controller sampled every control period, inputs
//! held constant in between and the vehicle integrated with DOPRI5.

use thiserror::Error;

use super::integrate::{dopri5, Dopri5Error, Dopri5Options};
use super::{slip_angle, vehicle_normal_force, ControlInput, NonplanarModel, PlanarModel, VehicleError, VehicleModel, VehicleParams, VehicleState};
use crate::geom::wrap_angle;
use crate::surfaces::RoadSurface;

/// What a controller reports for one control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerOutput {
    pub input: ControlInput,
    /// Speed reference actually tracked this tick.
    pub v_ref_adj: f64,
    /// Wall-clock solve time in milliseconds, NaN when not applicable.
    pub solve_ms: f64,
    pub status: &'static str,
    pub iterations: usize,
}

impl ControllerOutput {
    pub fn simple(input: ControlInput, v_ref: f64) -> Self {
        Self { input, v_ref_adj: v_ref, solve_ms: f64::NAN, status: "ok", iterations: 0 }
    }
}

pub trait Controller {
    fn name(&self) -> &str;
    fn control(&mut self, t: f64, state: &VehicleState) -> ControllerOutput;
}

/// Which derivative map the simulator integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimModel {
    #[default]
    Nonplanar,
    Planar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub model: SimModel,
    pub ode: Dopri5Options,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 0.05, duration: 10.0, model: SimModel::Nonplanar, ode: Dopri5Options::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub state: VehicleState,
    pub input: ControlInput,
    pub beta: f64,
    pub normal_force: f64,
    pub position: [f64; 3],
    pub v_ref_adj: f64,
    pub solve_ms: f64,
    pub status: &'static str,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<LogRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub step: usize,
    pub t: f64,
    pub reason: String,
    /// Rows logged before the failure.
    pub partial: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("initial state rejected: {0}")]
    InitialState(VehicleError),
    #[error("simulation diverged at step {} (t = {:.2} s): {}", .0.step, .0.t, .0.reason)]
    Diverged(Box<Divergence>),
}

/// Runs `controller` in closed loop on `road` from `initial`.
pub fn simulate(
    road: &RoadSurface,
    params: &VehicleParams,
    initial: VehicleState,
    controller: &mut dyn Controller,
    config: &SimConfig,
) -> Result<Trajectory, SimError> {
    road.check_domain(initial.pose.s, initial.pose.y).map_err(|e| SimError::InitialState(e.into()))?;
    let steps = (config.duration / config.dt).round() as usize;
    let mut traj = Trajectory { rows: Vec::with_capacity(steps) };
    let mut state = initial;
    let diverged = |step: usize, reason: String, traj: Trajectory| {
        SimError::Diverged(Box::new(Divergence { step, t: step as f64 * config.dt, reason, partial: traj }))
    };

    for k in 0..steps {
        let t = k as f64 * config.dt;
        let out = controller.control(t, &state);
        let input = params.saturate(out.input);
        let row = (|| -> Result<LogRow, VehicleError> {
            let beta = slip_angle(input.steer, params)?;
            let normal_force = vehicle_normal_force(road, &state, input.steer, params)?;
            let (p, _) = road.global_pose(&state.pose)?;
            Ok(LogRow {
                t,
                state,
                input,
                beta,
                normal_force,
                position: p.to_array(),
                v_ref_adj: out.v_ref_adj,
                solve_ms: out.solve_ms,
                status: out.status,
                iterations: out.iterations,
            })
        })();
        match row {
            Ok(r) => traj.rows.push(r),
            Err(e) => return Err(diverged(k, e.to_string(), traj)),
        }

        let u = input.to_array();
        let z0 = state.to_array();
        let next = match config.model {
            SimModel::Nonplanar => {
                let m = NonplanarModel { road, params: *params };
                dopri5(|_, z| m.rates(z, &u), &z0, t, t + config.dt, &config.ode)
            }
            SimModel::Planar => {
                let m = PlanarModel { road, params: *params };
                dopri5(|_, z| m.rates(z, &u), &z0, t, t + config.dt, &config.ode)
            }
        };
        let z = match next {
            Ok(z) => z,
            Err(Dopri5Error::Rates(e)) => return Err(diverged(k + 1, e.to_string(), traj)),
            Err(e) => return Err(diverged(k + 1, format!("integrator failure: {e:?}"), traj)),
        };
        state = VehicleState::new(z[0], z[1], z[2], wrap_angle(z[3]));
        if !state.is_finite() {
            return Err(diverged(k + 1, "non-finite state".into(), traj));
        }
        if let Err(e) = road.check_domain(state.pose.s, state.pose.y) {
            return Err(diverged(k + 1, e.to_string(), traj));
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::AngleProfile;

    struct Hold(ControlInput);

    impl Controller for Hold {
        fn name(&self) -> &str {
            "hold"
        }
        fn control(&mut self, _t: f64, _s: &VehicleState) -> ControllerOutput {
            ControllerOutput::simple(self.0, 0.0)
        }
    }

    fn flat(len: f64) -> RoadSurface {
        RoadSurface::tait_bryan(AngleProfile::from_samples(&[0.0, len], &[0.0; 2], &[0.0; 2], &[0.0; 2]).unwrap(), 3.0)
            .unwrap()
    }

    #[test]
    fn zero_input_on_flat_road() {
        let road = flat(200.0);
        let p = VehicleParams::default();
        let cfg = SimConfig { duration: 5.0, ..Default::default() };
        let traj = simulate(&road, &p, VehicleState::new(10.0, 0.0, 0.0, 0.0), &mut Hold(ControlInput::default()), &cfg)
            .unwrap();
        assert_eq!(traj.rows.len(), 100);
        for r in &traj.rows {
            assert!((r.state.v - 10.0).abs() < 1e-12);
            assert!(r.state.pose.y.abs() < 1e-12);
            assert!((r.state.pose.s - 10.0 * r.t).abs() < 1e-9);
        }
    }

    #[test]
    fn saturates_and_reports_divergence() {
        let road = flat(20.0);
        let p = VehicleParams::default();
        let cfg = SimConfig { duration: 5.0, ..Default::default() };
        let err = simulate(&road, &p, VehicleState::new(10.0, 0.0, 0.0, 0.0), &mut Hold(ControlInput::new(50.0, 0.0)), &cfg)
            .unwrap_err();
        match err {
            SimError::Diverged(d) => {
                assert!(d.step > 0);
                assert!(d.partial.rows.iter().all(|r| r.input.accel == 10.0));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn planar_and_nonplanar_agree_on_flat_road() {
        let road = flat(200.0);
        let p = VehicleParams::default();
        let cfg = SimConfig { duration: 4.0, ..Default::default() };
        let init = VehicleState::new(8.0, 1.0, 0.5, 0.02);
        let u = ControlInput::new(0.5, -0.01);
        let a = simulate(&road, &p, init, &mut Hold(u), &cfg).unwrap();
        let b = simulate(&road, &p, init, &mut Hold(u), &SimConfig { model: SimModel::Planar, ..cfg }).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            for (u, v) in x.state.to_array().iter().zip(y.state.to_array()) {
                assert!((u - v).abs() < 1e-7);
            }
        }
    }
}
