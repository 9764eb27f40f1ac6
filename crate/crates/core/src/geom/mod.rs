//! Differential geometry of a body in tangent contact with a parametric
//! surface `x(s, y)`.
//!
//! Everything here is surface-agnostic: a [`SurfaceJet`] carries the position,
//! first and second partials and unit normal at one parameter point, and the
//! free functions turn it into the first and second fundamental forms, the
//! pose Jacobian `J` and the velocity relations of a constrained rigid body.
//! All functions are generic over [`Real`] so the same code is evaluated with
//! `f64` and with dual numbers.

pub mod linalg;

use std::f64::consts::PI;

use thiserror::Error;

pub use linalg::{Mat2, Mat3, Vec3};

use crate::nlp::dual::Real;

/// Minimum tangent cross-product norm (SI units) for a chart to count as
/// regular.
pub const REGULARITY_EPS: f64 = 1e-9;

/// Relative tolerance on `x_s · x_y` for the orthogonal closed form of `J`.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("surface is not regular: tangent cross product norm {cross_norm:.3e} below {eps:.1e}")]
    Regularity { cross_norm: f64, eps: f64 },
    #[error("tangents are not orthogonal (x_s·x_y = {dot:.3e}); use the general pose Jacobian")]
    NonOrthogonal { dot: f64 },
    #[error("singular matrix in {what} (det = {det:.3e})")]
    Singular { what: &'static str, det: f64 },
    #[error("parameter point (s = {s}, y = {y}) is outside the domain [{s_min}, {s_max}] x [-{y_max}, {y_max}]")]
    Domain { s: f64, y: f64, s_min: f64, s_max: f64, y_max: f64 },
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// Position, partial derivatives and unit normal of a chart at `(s, y)`.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceJet<T> {
    pub position: Vec3<T>,
    pub xs: Vec3<T>,
    pub xy: Vec3<T>,
    pub xss: Vec3<T>,
    pub xsy: Vec3<T>,
    pub xyy: Vec3<T>,
    pub normal: Vec3<T>,
}

impl<T: Real> SurfaceJet<T> {
    /// Builds a jet from analytic partials; the normal is `x_s × x_y`
    /// normalised.
    pub fn new(
        position: Vec3<T>,
        xs: Vec3<T>,
        xy: Vec3<T>,
        xss: Vec3<T>,
        xsy: Vec3<T>,
        xyy: Vec3<T>,
    ) -> Result<Self, GeomError> {
        let cross = xs.cross(xy);
        let cross_norm = cross.norm();
        if !(cross_norm.value() > REGULARITY_EPS) {
            return Err(GeomError::Regularity { cross_norm: cross_norm.value(), eps: REGULARITY_EPS });
        }
        let normal = cross.scale(T::one() / cross_norm);
        Ok(Self { position, xs, xy, xss, xsy, xyy, normal })
    }

    pub fn values(&self) -> SurfaceJet<f64> {
        SurfaceJet {
            position: self.position.values(),
            xs: self.xs.values(),
            xy: self.xy.values(),
            xss: self.xss.values(),
            xsy: self.xsy.values(),
            xyy: self.xyy.values(),
            normal: self.normal.values(),
        }
    }

    fn check_regular(&self) -> Result<(), GeomError> {
        let n = self.xs.cross(self.xy).norm().value();
        if n > REGULARITY_EPS {
            Ok(())
        } else {
            Err(GeomError::Regularity { cross_norm: n, eps: REGULARITY_EPS })
        }
    }
}

/// `(s, y, θˢ)`: curvilinear position and heading relative to `x_s`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParametricPose {
    pub s: f64,
    pub y: f64,
    pub theta_s: f64,
}

impl ParametricPose {
    pub fn new(s: f64, y: f64, theta_s: f64) -> Self {
        Self { s, y, theta_s: wrap_angle(theta_s) }
    }
}

/// First (`I`) and second (`II`) fundamental forms together with the pose
/// Jacobian `J` at one body orientation.
#[derive(Debug, Clone, Copy)]
pub struct FundamentalForms<T> {
    pub first: Mat2<T>,
    pub second: Mat2<T>,
    pub jacobian: Mat2<T>,
}

impl<T: Real> FundamentalForms<T> {
    /// Forms at `jet` for a body at heading `theta_s`, using the orthogonal
    /// closed form of `J` when it applies and the general form otherwise.
    pub fn at_pose(jet: &SurfaceJet<T>, theta_s: T) -> Result<Self, GeomError> {
        let (first, second) = fundamental_forms(jet)?;
        let jacobian = match pose_jacobian(jet, theta_s) {
            Ok(j) => j,
            Err(GeomError::NonOrthogonal { .. }) => pose_jacobian_general(jet, theta_s)?,
            Err(e) => return Err(e),
        };
        Ok(Self { first, second, jacobian })
    }
}

/// Tangent-plane body velocity and the roll/pitch rates the surface imposes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyVelocity {
    pub v1: f64,
    pub v2: f64,
    pub omega3: f64,
    /// Populated by [`BodyVelocity::with_surface_rates`].
    pub omega1: f64,
    pub omega2: f64,
}

impl BodyVelocity {
    /// Normal body velocity; always zero under tangent contact.
    pub const V3: f64 = 0.0;

    pub fn planar(v1: f64, v2: f64, omega3: f64) -> Self {
        Self { v1, v2, omega3, omega1: 0.0, omega2: 0.0 }
    }

    pub fn with_surface_rates(mut self, forms: &FundamentalForms<f64>) -> Result<Self, GeomError> {
        let [w1, w2] = surface_angular_velocity(forms, self.v1, self.v2)?;
        self.omega1 = w1;
        self.omega2 = w2;
        Ok(self)
    }
}

/// Orthonormal body basis `(e1, e2, e3)` of a body at heading `theta_s`.
///
/// `e3` is the surface normal and `e1` makes angle `theta_s` with `x_s`
/// measured about the normal.
pub fn body_basis<T: Real>(jet: &SurfaceJet<T>, theta_s: T) -> (Vec3<T>, Vec3<T>, Vec3<T>) {
    let t = jet.xs.scale(T::one() / jet.xs.norm());
    let u = jet.normal.cross(t);
    let (c, s) = (theta_s.cos(), theta_s.sin());
    let e1 = t.scale(c) + u.scale(s);
    let e2 = u.scale(c) - t.scale(s);
    (e1, e2, jet.normal)
}

/// Recovers `θˢ` from body axes with a two-argument arctangent of
/// `(-e2·x_s, e1·x_s)`.
pub fn heading_from_basis<T: Real>(jet: &SurfaceJet<T>, e1: Vec3<T>, e2: Vec3<T>) -> T {
    (-e2.dot(jet.xs)).atan2(e1.dot(jet.xs))
}

/// Pose Jacobian `J = [[x_s·e1, x_s·e2], [x_y·e1, x_y·e2]]` in closed form for
/// orthogonal tangents.
pub fn pose_jacobian<T: Real>(jet: &SurfaceJet<T>, theta_s: T) -> Result<Mat2<T>, GeomError> {
    jet.check_regular()?;
    let ns = jet.xs.norm();
    let ny = jet.xy.norm();
    let dot = jet.xs.dot(jet.xy).value();
    if dot.abs() > ORTHOGONALITY_TOL * (ns.value() * ny.value()).max(1.0) {
        return Err(GeomError::NonOrthogonal { dot });
    }
    let (c, s) = (theta_s.cos(), theta_s.sin());
    Ok(Mat2::new(c * ns, -(s * ns), s * ny, c * ny))
}

/// Pose Jacobian from explicit body axes; valid for any regular chart.
pub fn pose_jacobian_general<T: Real>(jet: &SurfaceJet<T>, theta_s: T) -> Result<Mat2<T>, GeomError> {
    jet.check_regular()?;
    let (e1, e2, _) = body_basis(jet, theta_s);
    Ok(Mat2::new(jet.xs.dot(e1), jet.xs.dot(e2), jet.xy.dot(e1), jet.xy.dot(e2)))
}

/// First and second fundamental forms of the chart at the jet point.
pub fn fundamental_forms<T: Real>(jet: &SurfaceJet<T>) -> Result<(Mat2<T>, Mat2<T>), GeomError> {
    jet.check_regular()?;
    let sy = jet.xs.dot(jet.xy);
    let first = Mat2::new(jet.xs.dot(jet.xs), sy, sy, jet.xy.dot(jet.xy));
    let n = jet.normal;
    let m = jet.xsy.dot(n);
    let second = Mat2::new(jet.xss.dot(n), m, m, jet.xyy.dot(n));
    Ok((first, second))
}

fn checked_inverse<T: Real>(m: &Mat2<T>, what: &'static str, min_det: f64) -> Result<Mat2<T>, GeomError> {
    let det = m.det().value();
    if !(det.abs() > min_det) {
        return Err(GeomError::Singular { what, det });
    }
    Ok(m.inverse_unchecked())
}

/// Parameter rates `(ṡ, ẏ) = I⁻¹ J (v1, v2)`.
pub fn parametric_velocity<T: Real>(forms: &FundamentalForms<T>, v1: T, v2: T) -> Result<[T; 2], GeomError> {
    let i_inv = checked_inverse(&forms.first, "first fundamental form", REGULARITY_EPS * REGULARITY_EPS)?;
    Ok(i_inv.mul_vec(forms.jacobian.mul_vec([v1, v2])))
}

/// Shape-operator product `J⁻¹ II I⁻¹ J`, the map from `(v1, v2)` to
/// `(-ω2, ω1)`.
pub fn shape_operator<T: Real>(forms: &FundamentalForms<T>) -> Result<Mat2<T>, GeomError> {
    let i_inv = checked_inverse(&forms.first, "first fundamental form", REGULARITY_EPS * REGULARITY_EPS)?;
    let j_inv = checked_inverse(&forms.jacobian, "pose Jacobian", REGULARITY_EPS)?;
    Ok(j_inv * forms.second * i_inv * forms.jacobian)
}

/// Roll and pitch rates `(ω1, ω2)` induced by driving over a curved surface.
pub fn surface_angular_velocity<T: Real>(forms: &FundamentalForms<T>, v1: T, v2: T) -> Result<[T; 2], GeomError> {
    let [minus_w2, w1] = shape_operator(forms)?.mul_vec([v1, v2]);
    Ok([w1, -minus_w2])
}

/// Rate of change of `θˢ` given yaw rate `omega3` and parameter rates.
///
/// Uses the orientation-free cross-product form
/// `θ̇ˢ = ω3 + ((x_ss × x_s)·n ṡ + (x_sy × x_s)·n ẏ) / (x_s·x_s)`.
pub fn theta_s_rate<T: Real>(jet: &SurfaceJet<T>, omega3: T, s_dot: T, y_dot: T) -> Result<T, GeomError> {
    jet.check_regular()?;
    let g11 = jet.xs.dot(jet.xs);
    let ks = jet.xss.cross(jet.xs).dot(jet.normal);
    let ky = jet.xsy.cross(jet.xs).dot(jet.normal);
    Ok(omega3 + (ks * s_dot + ky * y_dot) / g11)
}

/// Diagnostics for a jet: condition numbers of `I` and `J`.
#[derive(Debug, Clone, Copy)]
pub struct Conditioning {
    pub first_form: f64,
    pub jacobian: f64,
}

pub fn conditioning(forms: &FundamentalForms<f64>) -> Conditioning {
    Conditioning { first_form: forms.first.condition_number(), jacobian: forms.jacobian.condition_number() }
}
