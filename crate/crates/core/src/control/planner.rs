//! Speed planner: the speed closest to the desired one that keeps the normal
//! force inside a band over the road ahead.

use serde::{Deserialize, Serialize};

use crate::dynamics::normal_force;
use crate::geom::{FundamentalForms, GeomError};
use crate::surfaces::RoadSurface;
use crate::vehicle::{VehicleParams, VehicleState};

use super::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeedPlannerConfig {
    /// Centerline arc length checked ahead of the vehicle (m).
    pub lookahead: f64,
    /// Admissible normal force `[min, max]` (N).
    pub force_band: [f64; 2],
    /// The planner aims this far inside the band (N) so tracking lag does
    /// not push the realised force across it.
    pub margin: f64,
    /// Weight of `(v − v_prev)²` relative to `(v − v_desired)²`.
    pub rate_weight: f64,
    pub samples: usize,
    pub max_speed: f64,
}

impl Default for SpeedPlannerConfig {
    fn default() -> Self {
        Self { lookahead: 30.0, force_band: [8000.0, 40000.0], margin: 500.0, rate_weight: 10.0, samples: 31, max_speed: 40.0 }
    }
}

impl SpeedPlannerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.force_band[0] < self.force_band[1]) {
            return Err(ConfigError("planner force band must have lower < upper".into()));
        }
        if !(self.margin >= 0.0) || 2.0 * self.margin >= self.force_band[1] - self.force_band[0] {
            return Err(ConfigError("planner margin must be non-negative and narrower than half the band".into()));
        }
        if !(self.lookahead > 0.0) {
            return Err(ConfigError("planner lookahead must be positive".into()));
        }
        if self.samples < 2 || !(self.rate_weight >= 0.0) || !(self.max_speed > 0.0) {
            return Err(ConfigError("planner needs ≥ 2 samples, rate weight ≥ 0 and a positive max speed".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    Feasible,
    /// No speed satisfies the band at every sample; the speed returned
    /// minimises the worst violation.
    InfeasibleBand,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedPlan {
    pub v_ref: f64,
    pub status: PlanStatus,
    /// Admissible speed interval, empty (`lo > hi`) when infeasible.
    pub interval: [f64; 2],
}

/// `F_N = curvature · v² + weight` at one sample.
#[derive(Debug, Clone, Copy)]
struct ForceLine {
    curvature: f64,
    weight: f64,
}

fn violation(lines: &[ForceLine], band: [f64; 2], q: f64) -> f64 {
    lines
        .iter()
        .map(|l| {
            let f = l.curvature * q + l.weight;
            (band[0] - f).max(f - band[1]).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// Adjusted speed reference for `state`, given the desired speed and the
/// previous adjusted value.
pub fn plan_speed(
    road: &RoadSurface,
    params: &VehicleParams,
    state: &VehicleState,
    desired: f64,
    config: &SpeedPlannerConfig,
    previous: f64,
) -> Result<SpeedPlan, GeomError> {
    road.check_domain(state.pose.s, state.pose.y)?;
    let (_, s_max) = road.s_range();
    let y = state.pose.y;
    let mut lines = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let s = (state.pose.s + config.lookahead * i as f64 / (config.samples - 1) as f64).min(s_max);
        let jet = road.evaluate_jet(s, y)?;
        let forms = FundamentalForms::at_pose(&jet, 0.0)?;
        let weight = normal_force(&jet, &forms, 0.0, 0.0, params.mass, params.gravity)?;
        let unit = normal_force(&jet, &forms, 0.0, 1.0, params.mass, params.gravity)?;
        lines.push(ForceLine { curvature: unit - weight, weight });
    }

    // admissible interval in q = v²
    let band = [config.force_band[0] + config.margin, config.force_band[1] - config.margin];
    let (mut lo, mut hi) = (0.0, config.max_speed * config.max_speed);
    for l in &lines {
        if l.curvature.abs() < 1e-12 {
            if l.weight < band[0] || l.weight > band[1] {
                lo = f64::INFINITY;
            }
            continue;
        }
        let (a, b) = ((band[0] - l.weight) / l.curvature, (band[1] - l.weight) / l.curvature);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }

    let rho = config.rate_weight;
    let target = (desired + rho * previous) / (1.0 + rho);
    if lo <= hi {
        let interval = [lo.sqrt(), hi.sqrt()];
        let v_ref = target.clamp(interval[0], interval[1]);
        return Ok(SpeedPlan { v_ref, status: PlanStatus::Feasible, interval });
    }

    // worst violation is convex in q
    let (mut a, mut b) = (0.0, config.max_speed * config.max_speed);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if violation(&lines, band, m1) <= violation(&lines, band, m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    Ok(SpeedPlan { v_ref: (0.5 * (a + b)).sqrt(), status: PlanStatus::InfeasibleBand, interval: [lo.sqrt(), hi.sqrt()] })
}
