//! Scenario files (TOML).
//!
//! ```toml
//! road = "roads/vertical_loop.toml"   # relative to this file
//! controller = "nonplanar-mpc"        # or "planar-mpc", "stanley"
//! v_ref = 10.0
//! duration = 20.0
//! control_period = 0.05
//! planner = true
//!
//! [initial]
//! v = 10.0
//! s = 0.0
//! y = 0.0
//! theta_s = 0.0
//! ```
//!
//! Optional tables `[vehicle]`, `[mpc]`, `[mpc.weights]`, `[speed_planner]`
//! and `[stanley]` override the defaults field by field.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::control::{ConfigError, ControllerKind, MpcConfig, SpeedPlannerConfig, StanleyConfig};
use crate::geom::GeomError;
use crate::surfaces::file::{line_col, toml_error};
use crate::surfaces::{RoadFileError, RoadSurface};
use crate::vehicle::{VehicleError, VehicleParams, VehicleState};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("road file {path}: {source}")]
    Road { path: String, source: RoadFileError },
    #[error("{0}")]
    Invalid(String),
    #[error("initial state is off the road: {0}")]
    Domain(GeomError),
}

impl From<ConfigError> for ScenarioError {
    fn from(e: ConfigError) -> Self {
        Self::Invalid(e.to_string())
    }
}

impl From<VehicleError> for ScenarioError {
    fn from(e: VehicleError) -> Self {
        Self::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialState {
    v: f64,
    #[serde(default)]
    s: f64,
    #[serde(default)]
    y: f64,
    #[serde(default)]
    theta_s: f64,
}

fn default_v_ref() -> f64 {
    10.0
}

fn default_period() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    road: String,
    controller: ControllerKind,
    #[serde(default = "default_v_ref")]
    v_ref: f64,
    duration: f64,
    #[serde(default = "default_period")]
    control_period: f64,
    #[serde(default = "default_true")]
    planner: bool,
    initial: toml::Spanned<InitialState>,
    #[serde(default)]
    vehicle: VehicleParams,
    #[serde(default)]
    mpc: MpcConfig,
    #[serde(default)]
    speed_planner: SpeedPlannerConfig,
    #[serde(default)]
    stanley: StanleyConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Name used for output files (the file stem).
    pub name: String,
    pub road_path: PathBuf,
    pub controller: ControllerKind,
    pub vehicle: VehicleParams,
    pub initial: VehicleState,
    pub v_ref: f64,
    pub duration: f64,
    pub control_period: f64,
    pub planner: bool,
    pub mpc: MpcConfig,
    pub speed_planner: SpeedPlannerConfig,
    pub stanley: StanleyConfig,
}

impl Scenario {
    /// Parses scenario text; `base` resolves the relative road path.
    pub fn parse(src: &str, name: &str, base: &Path) -> Result<Self, ScenarioError> {
        let parse_err = |line, column, message| ScenarioError::Parse { path: name.to_string(), line, column, message };
        let raw: RawScenario = toml::from_str(src).map_err(|e| {
            let (line, column, message) = toml_error(src, &e);
            parse_err(line, column, message)
        })?;
        let (line, column) = line_col(src, raw.initial.span().start);
        let init = raw.initial.into_inner();
        if ![init.v, init.s, init.y, init.theta_s].iter().all(|x| x.is_finite()) {
            return Err(parse_err(line, column, "initial state must be finite".into()));
        }
        let sc = Self {
            name: name.to_string(),
            road_path: base.join(&raw.road),
            controller: raw.controller,
            vehicle: raw.vehicle,
            initial: VehicleState::new(init.v, init.s, init.y, init.theta_s),
            v_ref: raw.v_ref,
            duration: raw.duration,
            control_period: raw.control_period,
            planner: raw.planner,
            mpc: raw.mpc,
            speed_planner: raw.speed_planner,
            stanley: raw.stanley,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let src = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        let name = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
        Self::parse(&src, &name, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.duration > 0.0) {
            return Err(ScenarioError::Invalid(format!("duration must be positive, got {}", self.duration)));
        }
        if !(self.control_period > 0.0) {
            return Err(ScenarioError::Invalid("control_period must be positive".into()));
        }
        if !(self.v_ref >= 0.0) {
            return Err(ScenarioError::Invalid("v_ref must be non-negative".into()));
        }
        self.vehicle.validate()?;
        self.mpc.validate()?;
        self.speed_planner.validate()?;
        self.stanley.validate()?;
        Ok(())
    }

    pub fn load_road(&self) -> Result<RoadSurface, ScenarioError> {
        let road = crate::surfaces::load_road(&self.road_path)
            .map_err(|source| ScenarioError::Road { path: self.road_path.display().to_string(), source })?;
        road.check_domain(self.initial.pose.s, self.initial.pose.y).map_err(ScenarioError::Domain)?;
        Ok(road)
    }
}
