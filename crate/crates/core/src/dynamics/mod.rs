//! Rigid-body relations under tangent contact: dynamic rates for a given
//! wrench, tangential gravity and the total normal force.

use thiserror::Error;

use crate::geom::{shape_operator, surface_angular_velocity, BodyVelocity, FundamentalForms, GeomError, SurfaceJet, Vec3};
use crate::nlp::dual::Real;

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("mass must be positive, got {0}")]
    Mass(f64),
    #[error("principal inertias must be positive, got {0:?}")]
    Inertia([f64; 3]),
    #[error("gravity must be non-negative, got {0}")]
    Gravity(f64),
}

/// Mass, diagonal body-frame inertia and gravity magnitude (acting along
/// `-e_3` of the global frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyParams {
    pub mass: f64,
    pub inertia: [f64; 3],
    pub gravity: f64,
}

impl RigidBodyParams {
    pub fn new(mass: f64, inertia: [f64; 3], gravity: f64) -> Result<Self, ParamsError> {
        if !(mass > 0.0) {
            return Err(ParamsError::Mass(mass));
        }
        if !inertia.iter().all(|&i| i > 0.0) {
            return Err(ParamsError::Inertia(inertia));
        }
        if !(gravity >= 0.0) {
            return Err(ParamsError::Gravity(gravity));
        }
        Ok(Self { mass, inertia, gravity })
    }
}

/// Net body-frame force (N) and torque (N·m).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NetWrench {
    pub force: [f64; 3],
    pub torque: [f64; 3],
}

/// `(v̇1, v̇2, ω̇3)` of a body in tangent contact.
pub fn constrained_dynamic_rates(params: &RigidBodyParams, vel: &BodyVelocity, wrench: &NetWrench) -> [f64; 3] {
    let m = params.mass;
    let [i1, i2, i3] = params.inertia;
    [
        vel.omega3 * vel.v2 + wrench.force[0] / m,
        -vel.omega3 * vel.v1 + wrench.force[1] / m,
        ((i1 - i2) * vel.omega1 * vel.omega2 + wrench.torque[2]) / i3,
    ]
}

/// Component of gravitational acceleration along the velocity direction
/// `cos β e1 + sin β e2`.
pub fn gravity_tangential<T: Real>(jet: &SurfaceJet<T>, forms: &FundamentalForms<T>, beta: T, gravity: f64) -> T {
    let up = Vec3::from_f64(Vec3::E3);
    let row = [jet.xs.dot(up) / jet.xs.norm_squared(), jet.xy.dot(up) / jet.xy.norm_squared()];
    let [d0, d1] = forms.jacobian.mul_vec([beta.cos(), beta.sin()]);
    -(row[0] * d0 + row[1] * d1) * gravity
}

/// Total normal force on a body moving at speed `v` in direction `β`:
/// centripetal reaction from the surface curvature plus the normal component
/// of weight.
pub fn normal_force<T: Real>(
    jet: &SurfaceJet<T>,
    forms: &FundamentalForms<T>,
    beta: T,
    v: T,
    mass: f64,
    gravity: f64,
) -> Result<T, GeomError> {
    let d = [beta.cos(), beta.sin()];
    let w = shape_operator(forms)?.mul_vec(d);
    let curvature = d[0] * w[0] + d[1] * w[1];
    let weight = jet.normal.z * (mass * gravity);
    Ok(v * v * curvature * mass + weight)
}

/// Constraint force `F3 = m (ω1 v2 − ω2 v1)` keeping the body on the surface.
pub fn constraint_reaction_f3<T: Real>(forms: &FundamentalForms<T>, v1: T, v2: T, mass: f64) -> Result<T, GeomError> {
    let [w1, w2] = surface_angular_velocity(forms, v1, v2)?;
    Ok((w1 * v2 - w2 * v1) * mass)
}
