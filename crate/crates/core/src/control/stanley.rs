use serde::{Deserialize, Serialize};

use crate::geom::GeomError;
use crate::surfaces::RoadSurface;
use crate::vehicle::{ControlInput, Controller, ControllerOutput, VehicleParams, VehicleState};

use super::{gravity_feed_forward, ConfigError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StanleyConfig {
    /// Cross-track gain (1/s).
    pub gain: f64,
    /// Softening speed (m/s).
    pub softening: f64,
    /// Proportional speed gain (1/s).
    pub speed_gain: f64,
}

impl Default for StanleyConfig {
    fn default() -> Self {
        Self { gain: 2.5, softening: 0.1, speed_gain: 2.0 }
    }
}

impl StanleyConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.gain > 0.0) || !(self.softening > 0.0) {
            return Err(ConfigError("stanley gain and softening speed must be positive".into()));
        }
        Ok(())
    }
}

/// Heading plus cross-track steering law with proportional speed control and
/// gravity feed-forward, saturated to the vehicle's input boxes.
pub fn stanley_step(
    road: &RoadSurface,
    params: &VehicleParams,
    state: &VehicleState,
    config: &StanleyConfig,
    v_ref: f64,
) -> Result<ControlInput, GeomError> {
    let p = &state.pose;
    let steer = -p.theta_s + (config.gain * -p.y / (state.v + config.softening)).atan();
    let accel = config.speed_gain * (v_ref - state.v) + gravity_feed_forward(road, state, params)?;
    Ok(params.saturate(ControlInput::new(accel, steer)))
}

pub struct StanleyController<'a> {
    pub road: &'a RoadSurface,
    pub params: VehicleParams,
    pub config: StanleyConfig,
    pub v_ref: f64,
}

impl Controller for StanleyController<'_> {
    fn name(&self) -> &str {
        "stanley"
    }

    fn control(&mut self, _t: f64, state: &VehicleState) -> ControllerOutput {
        match stanley_step(self.road, &self.params, state, &self.config, self.v_ref) {
            Ok(u) => ControllerOutput::simple(u, self.v_ref),
            Err(e) => {
                log::warn!("stanley: {e}; coasting");
                ControllerOutput { status: "error", ..ControllerOutput::simple(ControlInput::default(), self.v_ref) }
            }
        }
    }
}
