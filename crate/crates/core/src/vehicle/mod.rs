//! Kinematic bicycle model on a road surface, its planar Frenet counterpart,
//! and the integrators used for prediction and simulation.

pub mod integrate;
pub mod sim;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{gravity_tangential, normal_force, STANDARD_GRAVITY};
use crate::geom::{parametric_velocity, theta_s_rate, FundamentalForms, GeomError, ParametricPose};
use crate::nlp::dual::Real;
use crate::surfaces::RoadSurface;

pub use integrate::{dopri5, rk4_step, Dopri5Options};
pub use sim::{simulate, Controller, ControllerOutput, Divergence, LogRow, SimConfig, SimError, SimModel, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VehicleError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("steering angle {0} rad is outside (-π/2, π/2)")]
    SteeringDomain(f64),
    #[error("invalid vehicle parameters: {0}")]
    Params(String),
}

/// Vehicle parameters; defaults are a full-size passenger car.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    pub mass: f64,
    /// COM to front axle (m).
    pub lf: f64,
    /// COM to rear axle (m).
    pub lr: f64,
    pub accel_bounds: [f64; 2],
    pub steer_bounds: [f64; 2],
    pub com_height: f64,
    pub gravity: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 2303.0,
            lf: 1.52,
            lr: 1.50,
            accel_bounds: [-10.0, 10.0],
            steer_bounds: [-0.5, 0.5],
            com_height: 0.592,
            gravity: STANDARD_GRAVITY,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), VehicleError> {
        let bad = |m: &str| Err(VehicleError::Params(m.to_string()));
        if !(self.mass > 0.0) {
            return bad("mass must be positive");
        }
        if !(self.lf + self.lr > 0.0) {
            return bad("wheelbase must be positive");
        }
        if !(self.accel_bounds[0] < self.accel_bounds[1]) || !(self.steer_bounds[0] < self.steer_bounds[1]) {
            return bad("input lower bounds must be below upper bounds");
        }
        if self.steer_bounds[0] <= -std::f64::consts::FRAC_PI_2 || self.steer_bounds[1] >= std::f64::consts::FRAC_PI_2 {
            return bad("steering bounds must lie inside (-π/2, π/2)");
        }
        if !(self.gravity >= 0.0) {
            return bad("gravity must be non-negative");
        }
        Ok(())
    }

    pub fn wheelbase(&self) -> f64 {
        self.lf + self.lr
    }

    pub fn saturate(&self, u: ControlInput) -> ControlInput {
        ControlInput {
            accel: u.accel.clamp(self.accel_bounds[0], self.accel_bounds[1]),
            steer: u.steer.clamp(self.steer_bounds[0], self.steer_bounds[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub v: f64,
    pub pose: ParametricPose,
}

impl VehicleState {
    pub fn new(v: f64, s: f64, y: f64, theta_s: f64) -> Self {
        Self { v, pose: ParametricPose::new(s, y, theta_s) }
    }

    /// `[v, s, y, θˢ]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.v, self.pose.s, self.pose.y, self.pose.theta_s]
    }

    pub fn from_array(z: [f64; 4]) -> Self {
        Self::new(z[0], z[1], z[2], z[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Traction acceleration (m/s²) and front steering angle (rad).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    pub accel: f64,
    pub steer: f64,
}

impl ControlInput {
    pub fn new(accel: f64, steer: f64) -> Self {
        Self { accel, steer }
    }

    pub fn to_array(&self) -> [f64; 2] {
        [self.accel, self.steer]
    }
}

/// Slip angle of the kinematic bicycle, `atan(l_r/(l_r+l_f) tan γ)`.
pub fn slip_angle(steer: f64, params: &VehicleParams) -> Result<f64, VehicleError> {
    if !(steer.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(VehicleError::SteeringDomain(steer));
    }
    Ok(slip_angle_of(steer, params))
}

pub(crate) fn slip_angle_of<T: Real>(steer: T, params: &VehicleParams) -> T {
    (steer.tan() * (params.lr / params.wheelbase())).atan()
}

/// A state-derivative map `ż = f(z, u)` with `z = [v, s, y, θˢ]`,
/// `u = [a_t, γ]`, generic over the scalar so it can be differentiated.
pub trait VehicleModel: Sync {
    fn rates<T: Real>(&self, z: &[T; 4], u: &[T; 2]) -> Result<[T; 4], GeomError>;
}

/// The kinematic bicycle on a general road surface.
#[derive(Debug, Clone, Copy)]
pub struct NonplanarModel<'a> {
    pub road: &'a RoadSurface,
    pub params: VehicleParams,
}

impl VehicleModel for NonplanarModel<'_> {
    fn rates<T: Real>(&self, z: &[T; 4], u: &[T; 2]) -> Result<[T; 4], GeomError> {
        let [v, s, y, theta] = *z;
        let [accel, steer] = *u;
        let beta = slip_angle_of(steer, &self.params);
        let jet = self.road.jet(s, y)?;
        let forms = FundamentalForms::at_pose(&jet, theta)?;
        let (cb, sb) = (beta.cos(), beta.sin());
        let [s_dot, y_dot] = parametric_velocity(&forms, v * cb, v * sb)?;
        let yaw_rate = v * cb * steer.tan() / self.params.wheelbase();
        let theta_dot = theta_s_rate(&jet, yaw_rate, s_dot, y_dot)?;
        let v_dot = accel + gravity_tangential(&jet, &forms, beta, self.params.gravity);
        Ok([v_dot, s_dot, y_dot, theta_dot])
    }
}

/// Planar kinematic bicycle in Frenet coordinates about the road's in-plane
/// curvature. Ignores slope, bank and gravity.
#[derive(Debug, Clone, Copy)]
pub struct PlanarModel<'a> {
    pub road: &'a RoadSurface,
    pub params: VehicleParams,
}

impl VehicleModel for PlanarModel<'_> {
    fn rates<T: Real>(&self, z: &[T; 4], u: &[T; 2]) -> Result<[T; 4], GeomError> {
        let [v, s, y, theta] = *z;
        let [accel, steer] = *u;
        let beta = slip_angle_of(steer, &self.params);
        let [kappa, _] = self.road.geodesic_curvature(s);
        let stretch = T::one() - kappa * y;
        if !(stretch.value() > crate::geom::REGULARITY_EPS) {
            return Err(GeomError::Singular { what: "Frenet stretch 1 - κy", det: stretch.value() });
        }
        let heading = theta + beta;
        let s_dot = v * heading.cos() / stretch;
        let y_dot = v * heading.sin();
        let theta_dot = v * beta.cos() * steer.tan() / self.params.wheelbase() - kappa * s_dot;
        Ok([accel, s_dot, y_dot, theta_dot])
    }
}

/// Domain-checked state rates `(v̇, ṡ, ẏ, θ̇ˢ)` of the kinematic bicycle on
/// `road`.
pub fn kinematic_derivatives(
    road: &RoadSurface,
    state: &VehicleState,
    input: &ControlInput,
    params: &VehicleParams,
) -> Result<[f64; 4], VehicleError> {
    road.check_domain(state.pose.s, state.pose.y)?;
    slip_angle(input.steer, params)?;
    Ok(NonplanarModel { road, params: *params }.rates(&state.to_array(), &input.to_array())?)
}

/// Total normal force on the vehicle at `state` when steering at `steer`.
pub fn vehicle_normal_force(
    road: &RoadSurface,
    state: &VehicleState,
    steer: f64,
    params: &VehicleParams,
) -> Result<f64, VehicleError> {
    let jet = road.evaluate_jet(state.pose.s, state.pose.y)?;
    let forms = FundamentalForms::at_pose(&jet, state.pose.theta_s)?;
    let beta = slip_angle(steer, params)?;
    Ok(normal_force(&jet, &forms, beta, state.v, params.mass, params.gravity)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{AngleProfile, CurvatureProfile};
    use approx::assert_relative_eq;

    fn flat() -> RoadSurface {
        RoadSurface::tait_bryan(AngleProfile::from_samples(&[0.0, 100.0], &[0.0; 2], &[0.0; 2], &[0.0; 2]).unwrap(), 3.0)
            .unwrap()
    }

    #[test]
    fn slip_angle_values() {
        let p = VehicleParams::default();
        assert_eq!(slip_angle(0.0, &p).unwrap(), 0.0);
        let b = slip_angle(0.5, &p).unwrap();
        assert_relative_eq!(b, (1.5f64 / 3.02 * 0.5f64.tan()).atan(), max_relative = 1e-15);
        assert_relative_eq!(b, 0.264_962_503_036_102, max_relative = 1e-14);
        assert_eq!(slip_angle(-0.5, &p).unwrap(), -b);
        assert!(slip_angle(1.6, &p).is_err());
    }

    #[test]
    fn straight_road_rates() {
        let road = flat();
        let r = kinematic_derivatives(
            &road,
            &VehicleState::new(10.0, 5.0, 0.0, 0.0),
            &ControlInput::default(),
            &VehicleParams::default(),
        )
        .unwrap();
        assert_eq!(r, [0.0, 10.0, 0.0, 0.0]);
    }

    #[test]
    fn uphill_decelerates() {
        let b = 0.15;
        let road = RoadSurface::tait_bryan(
            AngleProfile::from_samples(&[0.0, 50.0, 100.0], &[0.0; 3], &[b; 3], &[0.0; 3]).unwrap(),
            3.0,
        )
        .unwrap();
        let p = VehicleParams::default();
        let r = kinematic_derivatives(&road, &VehicleState::new(8.0, 20.0, 1.0, 0.0), &ControlInput::new(1.0, 0.0), &p)
            .unwrap();
        assert_relative_eq!(r[0], 1.0 - p.gravity * b.sin(), max_relative = 1e-12);
    }

    #[test]
    fn planar_matches_frenet_road() {
        let s = [0.0, 20.0, 40.0, 60.0];
        let road =
            RoadSurface::frenet(CurvatureProfile::from_samples(&s, &[0.0, 0.05, -0.02, 0.03]).unwrap(), 3.0).unwrap();
        let p = VehicleParams::default();
        let z = [9.0, 27.0, -1.3, 0.2];
        let u = [0.7, -0.12];
        let a = NonplanarModel { road: &road, params: p }.rates(&z, &u).unwrap();
        let b = PlanarModel { road: &road, params: p }.rates(&z, &u).unwrap();
        for i in 0..4 {
            assert_relative_eq!(a[i], b[i], max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn saturation() {
        let p = VehicleParams::default();
        assert_eq!(p.saturate(ControlInput::new(12.0, -0.7)), ControlInput::new(10.0, -0.5));
    }
}
