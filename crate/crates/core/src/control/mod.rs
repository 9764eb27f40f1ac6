//! Path-tracking controllers: the nonplanar MPC with its normal-force speed
//! planner, a planar Frenet MPC, and a Stanley controller.

pub mod mpc;
pub mod planner;
pub mod stanley;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::gravity_tangential;
use crate::geom::{FundamentalForms, GeomError};
use crate::surfaces::RoadSurface;
use crate::vehicle::{Controller, ControllerOutput, VehicleParams, VehicleState};

pub use mpc::{mpc_step, warm_shift, MpcConfig, MpcDiagnostics, MpcModel, MpcProblem, MpcWarmStart, MpcWeights};
pub use planner::{plan_speed, PlanStatus, SpeedPlan, SpeedPlannerConfig};
pub use stanley::{stanley_step, StanleyConfig, StanleyController};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid controller configuration: {0}")]
pub struct ConfigError(pub String);

/// `−g·e1`: acceleration cancelling gravity along the body axis.
pub fn gravity_feed_forward(road: &RoadSurface, state: &VehicleState, params: &VehicleParams) -> Result<f64, GeomError> {
    let jet = road.evaluate_jet(state.pose.s, state.pose.y)?;
    let forms = FundamentalForms::at_pose(&jet, state.pose.theta_s)?;
    Ok(-gravity_tangential(&jet, &forms, 0.0, params.gravity))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    NonplanarMpc,
    PlanarMpc,
    Stanley,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [Self::NonplanarMpc, Self::PlanarMpc, Self::Stanley];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::NonplanarMpc => "nonplanar-mpc",
            Self::PlanarMpc => "planar-mpc",
            Self::Stanley => "stanley",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown controller '{s}' (expected nonplanar-mpc, planar-mpc or stanley)"))
    }
}

/// MPC controller for closed-loop simulation. The nonplanar variant runs the
/// speed planner first when one is configured; the planar variant adds
/// gravity feed-forward to its acceleration.
pub struct MpcController<'a> {
    pub road: &'a RoadSurface,
    pub params: VehicleParams,
    pub config: MpcConfig,
    pub planner: Option<SpeedPlannerConfig>,
    pub warm: MpcWarmStart,
    adjusted: Option<f64>,
    pub last: Option<MpcDiagnostics>,
}

impl<'a> MpcController<'a> {
    pub fn new(
        road: &'a RoadSurface,
        params: VehicleParams,
        config: MpcConfig,
        planner: Option<SpeedPlannerConfig>,
    ) -> Self {
        let warm = MpcWarmStart::new(&config);
        Self { road, params, config, planner, warm, adjusted: None, last: None }
    }
}

impl Controller for MpcController<'_> {
    fn name(&self) -> &str {
        match self.config.model {
            MpcModel::Nonplanar => "nonplanar-mpc",
            MpcModel::Planar => "planar-mpc",
        }
    }

    fn control(&mut self, _t: f64, state: &VehicleState) -> ControllerOutput {
        let desired = self.config.v_ref;
        let mut v_ref = desired;
        if let Some(pc) = &self.planner {
            let previous = self.adjusted.unwrap_or(state.v);
            match plan_speed(self.road, &self.params, state, desired, pc, previous) {
                Ok(plan) => {
                    if plan.status == PlanStatus::InfeasibleBand {
                        log::debug!("speed planner: band infeasible at s = {:.2}", state.pose.s);
                    }
                    v_ref = plan.v_ref;
                }
                Err(e) => log::warn!("speed planner: {e}"),
            }
            self.adjusted = Some(v_ref);
        }
        let cfg = MpcConfig { v_ref, ..self.config };
        let (mut input, diag) = mpc_step(self.road, &self.params, state, &cfg, &mut self.warm);
        if self.config.model == MpcModel::Planar {
            match gravity_feed_forward(self.road, state, &self.params) {
                Ok(ff) => input = self.params.saturate(crate::vehicle::ControlInput::new(input.accel + ff, input.steer)),
                Err(e) => log::warn!("feed-forward: {e}"),
            }
        }
        let out = ControllerOutput {
            input,
            v_ref_adj: v_ref,
            solve_ms: diag.solve_ms,
            status: diag.status.as_str(),
            iterations: diag.iterations,
        };
        self.last = Some(diag);
        out
    }
}
