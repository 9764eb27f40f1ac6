//! Scenario runner behind the `nonplanar` binary: loads scenario and road
//! files, simulates a controller in closed loop, and writes trajectory CSVs
//! and metrics.

pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::control::{ControllerKind, MpcConfig, MpcController, MpcModel, StanleyController};
use crate::surfaces::RoadSurface;
use crate::vehicle::{simulate, Controller, Divergence, SimConfig, SimError, Trajectory};

pub use output::{metrics_table, trajectory_csv, write_atomic, RunMetrics, CSV_HEADER};
pub use scenario::{Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Usage(String),
    #[error("writing {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

/// Command-line style overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub road: Option<PathBuf>,
    pub duration: Option<f64>,
    pub v_ref: Option<f64>,
    pub controller: Option<ControllerKind>,
    pub no_planner: bool,
}

impl Overrides {
    pub fn apply(&self, sc: &mut Scenario) -> Result<(), ScenarioError> {
        if let Some(r) = &self.road {
            sc.road_path = r.clone();
        }
        if let Some(d) = self.duration {
            sc.duration = d;
        }
        if let Some(v) = self.v_ref {
            sc.v_ref = v;
        }
        if let Some(c) = self.controller {
            sc.controller = c;
        }
        if self.no_planner {
            sc.planner = false;
        }
        sc.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Record wall-clock solve times in the CSV.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { timing: true }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub controller: ControllerKind,
    pub trajectory: Trajectory,
    pub metrics: RunMetrics,
    /// Set when the simulation stopped early; `trajectory` holds the rows
    /// logged before the failure.
    pub divergence: Option<Divergence>,
}

/// Builds the controller a scenario asks for. The planar MPC never uses the
/// speed planner.
pub fn build_controller<'a>(sc: &Scenario, kind: ControllerKind, road: &'a RoadSurface) -> Box<dyn Controller + 'a> {
    let mpc = |model| MpcConfig { v_ref: sc.v_ref, dt: sc.control_period, model, ..sc.mpc };
    match kind {
        ControllerKind::NonplanarMpc => Box::new(MpcController::new(
            road,
            sc.vehicle,
            mpc(MpcModel::Nonplanar),
            sc.planner.then_some(sc.speed_planner),
        )),
        ControllerKind::PlanarMpc => Box::new(MpcController::new(road, sc.vehicle, mpc(MpcModel::Planar), None)),
        ControllerKind::Stanley => {
            Box::new(StanleyController { road, params: sc.vehicle, config: sc.stanley, v_ref: sc.v_ref })
        }
    }
}

/// Simulates `kind` on the scenario's road.
pub fn run_controller(sc: &Scenario, road: &RoadSurface, kind: ControllerKind) -> RunOutcome {
    let mut controller = build_controller(sc, kind, road);
    let cfg = SimConfig { dt: sc.control_period, duration: sc.duration, ..Default::default() };
    let (trajectory, divergence) = match simulate(road, &sc.vehicle, sc.initial, controller.as_mut(), &cfg) {
        Ok(t) => (t, None),
        Err(SimError::Diverged(d)) => (d.partial.clone(), Some(*d)),
        Err(SimError::InitialState(e)) => {
            let d = Divergence { step: 0, t: 0.0, reason: e.to_string(), partial: Trajectory::default() };
            (Trajectory::default(), Some(d))
        }
    };
    let metrics = RunMetrics::from_trajectory(&trajectory, sc.speed_planner.force_band);
    RunOutcome { controller: kind, trajectory, metrics, divergence }
}

/// Runs the scenario's own controller.
pub fn run(sc: &Scenario) -> Result<RunOutcome, ScenarioError> {
    let road = sc.load_road()?;
    Ok(run_controller(sc, &road, sc.controller))
}

#[derive(Serialize)]
struct MetricsDoc<'a> {
    scenario: &'a str,
    controller: &'a str,
    completed: bool,
    divergence: Option<String>,
    metrics: &'a RunMetrics,
}

fn metrics_json(sc: &Scenario, out: &RunOutcome) -> String {
    let doc = MetricsDoc {
        scenario: &sc.name,
        controller: out.controller.as_str(),
        completed: out.divergence.is_none(),
        divergence: out.divergence.as_ref().map(|d| format!("step {} (t = {} s): {}", d.step, d.t, d.reason)),
        metrics: &out.metrics,
    };
    serde_json::to_string_pretty(&doc).expect("metrics serialize") + "\n"
}

/// Writes `<scenario>_<controller>.csv` and `.metrics.json` into `dir`.
pub fn write_outputs(dir: &Path, sc: &Scenario, out: &RunOutcome, opts: RunOptions) -> Result<[PathBuf; 2], RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Output { path: dir.display().to_string(), source })?;
    let stem = format!("{}_{}", sc.name, out.controller);
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.metrics.json"));
    for (p, body) in [(&csv, trajectory_csv(&out.trajectory, opts.timing)), (&json, metrics_json(sc, out))] {
        write_atomic(p, body.as_bytes()).map_err(|source| RunError::Output { path: p.display().to_string(), source })?;
    }
    Ok([csv, json])
}

/// Runs several controllers on the same road and initial state, in parallel.
/// A failing controller is reported in its slot without stopping the others.
pub fn compare(sc: &Scenario, controllers: &[ControllerKind]) -> Result<Vec<RunOutcome>, RunError> {
    if controllers.len() < 2 {
        return Err(RunError::Usage("compare needs at least two controllers".into()));
    }
    let road = sc.load_road()?;
    let road = &road;
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> =
            controllers.iter().map(|&k| scope.spawn(move || run_controller(sc, road, k))).collect();
        handles.into_iter().map(|h| h.join().expect("controller thread panicked")).collect()
    }))
}

/// Label and metrics (or failure reason) for each outcome, for the table.
pub fn summary_rows(outcomes: &[RunOutcome]) -> Vec<(String, Result<RunMetrics, String>)> {
    outcomes
        .iter()
        .map(|o| {
            let m = match &o.divergence {
                None => Ok(o.metrics.clone()),
                Some(d) => Err(format!("diverged at t = {:.2} s: {}", d.t, d.reason)),
            };
            (o.controller.to_string(), m)
        })
        .collect()
}
