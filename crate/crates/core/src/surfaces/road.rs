//! Centerline road surfaces `x(s, y) = x_c(s) + y e_y(s)` in three flavours:
//! planar Frenet, Tait-Bryan angles and Darboux-frame curvatures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::frames::{darboux_generator, frame_from_angles, frame_with_derivatives};
use super::profile::{AngleProfile, CurvatureProfile, DarbouxProfile};
use crate::geom::{
    body_basis, fundamental_forms, heading_from_basis, GeomError, Mat3, ParametricPose, SurfaceJet, Vec3,
    REGULARITY_EPS,
};
use crate::nlp::dual::Real;

/// Default height of the vehicle's centre of mass above the road (m).
pub const DEFAULT_COM_HEIGHT: f64 = 0.592;

const QUADRATURE_STEP: f64 = 0.1;
const FRAME_STEP: f64 = 0.05;
const GRID_PITCH: f64 = 0.5;
const GRID_LATERAL_NODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoadKind {
    Frenet,
    TaitBryan,
    Darboux,
}

impl std::fmt::Display for RoadKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Frenet => "frenet",
            Self::TaitBryan => "tait-bryan",
            Self::Darboux => "darboux",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RoadProfile {
    Curvature(CurvatureProfile),
    Angles(AngleProfile),
    Darboux(DarbouxProfile),
}

impl RoadProfile {
    pub fn kind(&self) -> RoadKind {
        match self {
            Self::Curvature(_) => RoadKind::Frenet,
            Self::Angles(_) => RoadKind::TaitBryan,
            Self::Darboux(_) => RoadKind::Darboux,
        }
    }

    fn range(&self) -> (f64, f64) {
        match self {
            Self::Curvature(p) => p.range(),
            Self::Angles(p) => p.range(),
            Self::Darboux(p) => p.range(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadOptions {
    /// Centerline position at the first breakpoint.
    pub anchor: [f64; 3],
    pub lane_half_width: f64,
    /// Recorded as metadata; the authored surface already sits at COM height.
    pub com_height: f64,
    /// Heading, slope and bank of the starting frame for Frenet and Darboux
    /// roads. `None` means level and pointing along `x`, except for Darboux
    /// profiles converted from angles, which start from those angles.
    pub initial_angles: Option<[f64; 3]>,
}

impl Default for RoadOptions {
    fn default() -> Self {
        Self { anchor: [0.0; 3], lane_half_width: 4.0, com_height: DEFAULT_COM_HEIGHT, initial_angles: None }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoadError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("surface is not regular at s = {s}, y = {y}: {source}")]
    Irregular { s: f64, y: f64, source: GeomError },
    #[error("lane folds over itself at s = {s}, y = {y} (x_s·e_s = {stretch:.3e}); reduce the lane width or the curvature")]
    FoldOver { s: f64, y: f64, stretch: f64 },
    #[error("lane half-width must be positive and finite, got {0}")]
    LaneWidth(f64),
}

#[derive(Debug, Clone, Copy)]
struct Node {
    s: f64,
    position: Vec3<f64>,
    frame: Mat3<f64>,
}

/// An immutable road surface with an eagerly built centerline cache.
#[derive(Debug, Clone)]
pub struct RoadSurface {
    profile: RoadProfile,
    options: RoadOptions,
    s_range: (f64, f64),
    initial_frame: Mat3<f64>,
    node_step: f64,
    nodes: Vec<Node>,
}

impl RoadSurface {
    pub fn new(profile: RoadProfile, options: RoadOptions) -> Result<Self, RoadError> {
        let w = options.lane_half_width;
        if !(w > 0.0 && w.is_finite()) {
            return Err(RoadError::LaneWidth(w));
        }
        let s_range = profile.range();
        let initial_angles = match (&options.initial_angles, &profile) {
            (Some(a), _) => *a,
            (None, RoadProfile::Darboux(DarbouxProfile::FromAngles(p))) => {
                let [a, b, c] = p.eval(s_range.0);
                [a[0], b[0], c[0]]
            }
            (None, _) => [0.0; 3],
        };
        let initial_frame = frame_from_angles(initial_angles[0], initial_angles[1], initial_angles[2]);
        let step_limit = if matches!(profile, RoadProfile::Darboux(_)) { FRAME_STEP } else { QUADRATURE_STEP };
        let len = s_range.1 - s_range.0;
        let n = (len / step_limit).ceil().max(1.0) as usize;
        let node_step = len / n as f64;

        let mut road = Self { profile, options, s_range, initial_frame, node_step, nodes: Vec::with_capacity(n + 1) };
        let anchor = Vec3::new(road.options.anchor[0], road.options.anchor[1], road.options.anchor[2]);
        let mut node = Node { s: s_range.0, position: anchor, frame: road.frame_at_start() };
        road.nodes.push(node);
        for i in 1..=n {
            let s1 = if i == n { s_range.1 } else { s_range.0 + i as f64 * node_step };
            node = road.advance(node, s1);
            road.nodes.push(node);
        }
        road.check_regularity()?;
        Ok(road)
    }

    pub fn frenet(profile: CurvatureProfile, lane_half_width: f64) -> Result<Self, RoadError> {
        Self::new(RoadProfile::Curvature(profile), RoadOptions { lane_half_width, ..Default::default() })
    }

    pub fn tait_bryan(profile: AngleProfile, lane_half_width: f64) -> Result<Self, RoadError> {
        Self::new(RoadProfile::Angles(profile), RoadOptions { lane_half_width, ..Default::default() })
    }

    pub fn darboux(profile: DarbouxProfile, lane_half_width: f64) -> Result<Self, RoadError> {
        Self::new(RoadProfile::Darboux(profile), RoadOptions { lane_half_width, ..Default::default() })
    }

    pub fn kind(&self) -> RoadKind {
        self.profile.kind()
    }

    pub fn profile(&self) -> &RoadProfile {
        &self.profile
    }

    pub fn options(&self) -> &RoadOptions {
        &self.options
    }

    pub fn s_range(&self) -> (f64, f64) {
        self.s_range
    }

    pub fn length(&self) -> f64 {
        self.s_range.1 - self.s_range.0
    }

    pub fn lane_half_width(&self) -> f64 {
        self.options.lane_half_width
    }

    pub fn com_height(&self) -> f64 {
        self.options.com_height
    }

    pub fn contains(&self, s: f64, y: f64) -> bool {
        s >= self.s_range.0 && s <= self.s_range.1 && y.abs() <= self.options.lane_half_width
    }

    pub fn check_domain(&self, s: f64, y: f64) -> Result<(), GeomError> {
        if self.contains(s, y) {
            Ok(())
        } else {
            Err(GeomError::Domain {
                s,
                y,
                s_min: self.s_range.0,
                s_max: self.s_range.1,
                y_max: self.options.lane_half_width,
            })
        }
    }

    /// Domain-checked jet at `(s, y)`.
    pub fn evaluate_jet(&self, s: f64, y: f64) -> Result<SurfaceJet<f64>, GeomError> {
        self.check_domain(s, y)?;
        self.jet(s, y)
    }

    /// Jet without the domain check. Outside `[s_0, s_N]` the profiles are
    /// continued linearly, which keeps prediction horizons that overrun the
    /// road end well defined.
    pub fn jet<T: Real>(&self, s: T, y: T) -> Result<SurfaceJet<T>, GeomError> {
        let position = self.centerline_lifted(s);
        match &self.profile {
            RoadProfile::Curvature(p) => {
                let [k, ks] = p.eval(s);
                let frame = self.frenet_frame(s, k);
                let (es, ey) = (frame.col(0), frame.col(1));
                let stretch = T::one() - y * k;
                SurfaceJet::new(
                    position + ey.scale(y),
                    es.scale(stretch),
                    ey,
                    es.scale(-(y * ks)) + ey.scale(stretch * k),
                    es.scale(-k),
                    Vec3::zeros(),
                )
            }
            RoadProfile::Angles(p) => {
                let [a, b, c] = p.eval(s);
                let [r, r1, r2] = frame_with_derivatives(a, b, c);
                let (es, ey) = (r.col(0), r.col(1));
                let (des, dey, ddey) = (r1.col(0), r1.col(1), r2.col(1));
                SurfaceJet::new(
                    position + ey.scale(y),
                    es + dey.scale(y),
                    ey,
                    des + ddey.scale(y),
                    dey,
                    Vec3::zeros(),
                )
            }
            RoadProfile::Darboux(p) => {
                let [[ks, dks], [ky, _], [kn, dkn]] = p.eval(s);
                let frame = self.darboux_frame_lifted(s);
                let (es, ey, en) = (frame.col(0), frame.col(1), frame.col(2));
                let xs = es.scale(T::one() - y * kn) + en.scale(y * ks);
                let xss = es.scale(y * (ks * ky - dkn))
                    + ey.scale(kn - y * (ks * ks + kn * kn))
                    + en.scale(y * (dks + ky * kn) - ky);
                let xsy = en.scale(ks) - es.scale(kn);
                SurfaceJet::new(position + ey.scale(y), xs, ey, xss, xsy, Vec3::zeros())
            }
        }
    }

    /// Darboux curvatures `(κˢ, κʸ, κⁿ)` of the centerline and their
    /// arc-length derivatives.
    pub fn darboux_curvatures<T: Real>(&self, s: T) -> [[T; 2]; 3] {
        match &self.profile {
            RoadProfile::Curvature(p) => {
                let z = [T::zero(), T::zero()];
                [z, z, p.eval(s)]
            }
            RoadProfile::Angles(p) => p.darboux(s),
            RoadProfile::Darboux(p) => p.eval(s),
        }
    }

    /// In-plane (geodesic) curvature of the centerline and its derivative;
    /// the curvature a planar model of this road sees.
    pub fn geodesic_curvature<T: Real>(&self, s: T) -> [T; 2] {
        self.darboux_curvatures(s)[2]
    }

    /// Domain-checked centerline point `x_c(s)`.
    pub fn centerline_position(&self, s: f64) -> Result<Vec3<f64>, GeomError> {
        self.check_domain(s, 0.0)?;
        Ok(self.centerline_state(s).position)
    }

    /// Domain-checked centerline frame `[e_s | e_y | e_n]`.
    pub fn centerline_frame(&self, s: f64) -> Result<Mat3<f64>, GeomError> {
        self.check_domain(s, 0.0)?;
        Ok(self.frame_f64(s))
    }

    /// Global position and body rotation (columns `e1, e2, e3`) of a pose.
    pub fn global_pose(&self, pose: &ParametricPose) -> Result<(Vec3<f64>, Mat3<f64>), GeomError> {
        let jet = self.evaluate_jet(pose.s, pose.y)?;
        let (e1, e2, e3) = body_basis(&jet, pose.theta_s);
        Ok((jet.position, Mat3::from_columns(e1, e2, e3)))
    }

    /// Recovers the parametric pose of a body at `position` with rotation
    /// `rotation` by Newton iteration on `x(s, y) = position` from `guess`.
    pub fn pose_from_global(
        &self,
        position: Vec3<f64>,
        rotation: &Mat3<f64>,
        guess: (f64, f64),
    ) -> Result<ParametricPose, GeomError> {
        let (mut s, mut y) = guess;
        for _ in 0..50 {
            let jet = self.jet(s, y)?;
            let r = position - jet.position;
            // Gauss-Newton on the 3x2 system [x_s x_y] d = r
            let (a, b, c) = (jet.xs.dot(jet.xs), jet.xs.dot(jet.xy), jet.xy.dot(jet.xy));
            let (p, q) = (jet.xs.dot(r), jet.xy.dot(r));
            let det = a * c - b * b;
            if !(det.abs() > REGULARITY_EPS * REGULARITY_EPS) {
                return Err(GeomError::Singular { what: "first fundamental form", det });
            }
            let ds = (c * p - b * q) / det;
            let dy = (a * q - b * p) / det;
            s += ds;
            y += dy;
            if ds.abs().max(dy.abs()) < 1e-13 {
                break;
            }
        }
        self.check_domain(s, y)?;
        let jet = self.jet(s, y)?;
        let theta = heading_from_basis(&jet, rotation.col(0), rotation.col(1));
        Ok(ParametricPose::new(s, y, theta))
    }

    fn frame_at_start(&self) -> Mat3<f64> {
        match &self.profile {
            RoadProfile::Angles(p) => {
                let [a, b, c] = p.eval(self.s_range.0);
                frame_from_angles(a[0], b[0], c[0])
            }
            _ => self.initial_frame,
        }
    }

    fn heading_change(&self, s: f64) -> f64 {
        match &self.profile {
            RoadProfile::Curvature(p) => p.heading_change(s),
            _ => 0.0,
        }
    }

    fn frenet_frame<T: Real>(&self, s: T, kappa: T) -> Mat3<T> {
        let psi = s.lift(self.heading_change(s.value()), kappa.value());
        let (c, sn) = (psi.cos(), psi.sin());
        let (o, z) = (T::one(), T::zero());
        let planar = Mat3::from_rows([[c, -sn, z], [sn, c, z], [z, z, o]]);
        lift_const(&self.initial_frame) * planar
    }

    fn frame_f64(&self, s: f64) -> Mat3<f64> {
        match &self.profile {
            RoadProfile::Curvature(p) => self.frenet_frame(s, p.eval(s)[0]),
            RoadProfile::Angles(p) => {
                let [a, b, c] = p.eval(s);
                frame_from_angles(a[0], b[0], c[0])
            }
            RoadProfile::Darboux(_) => self.centerline_state(s).frame,
        }
    }

    fn tangent(&self, s: f64) -> Vec3<f64> {
        self.frame_f64(s).col(0)
    }

    fn darboux_rate(&self, s: f64, frame: &Mat3<f64>) -> Mat3<f64> {
        let k = self.darboux_curvatures(s);
        *frame * darboux_generator([k[0][0], k[1][0], k[2][0]])
    }

    /// Advances the centerline from `node` to `s1`. Frenet and Tait-Bryan
    /// frames are closed form and positions use 3-point Gauss-Legendre
    /// quadrature; Darboux frames are integrated by a Magnus step and
    /// positions by the same quadrature over the integrated tangent.
    fn advance(&self, node: Node, s1: f64) -> Node {
        let total = s1 - node.s;
        if total == 0.0 {
            return node;
        }
        let limit = if matches!(self.profile, RoadProfile::Darboux(_)) { FRAME_STEP } else { QUADRATURE_STEP };
        let n = (total.abs() / limit).ceil().max(1.0) as usize;
        let h = total / n as f64;
        let mut cur = node;
        for i in 0..n {
            let s0 = node.s + i as f64 * h;
            let s_next = if i + 1 == n { s1 } else { s0 + h };
            cur = match self.profile {
                RoadProfile::Darboux(_) => self.magnus_node_step(cur, s_next - cur.s),
                _ => {
                    let hh = s_next - cur.s;
                    let mid = cur.s + 0.5 * hh;
                    let off = 0.5 * hh * (0.6f64).sqrt();
                    let sum = self.tangent(mid - off).scale_f64(5.0)
                        + self.tangent(mid).scale_f64(8.0)
                        + self.tangent(mid + off).scale_f64(5.0);
                    Node { s: s_next, position: cur.position + sum.scale_f64(hh / 18.0), frame: self.frame_f64(s_next) }
                }
            };
        }
        cur
    }

    fn darboux_rate_vector(&self, s: f64) -> Vec3<f64> {
        let k = self.darboux_curvatures(s);
        Vec3::new(k[0][0], k[1][0], k[2][0])
    }

    /// Fourth-order Magnus step for `R' = R [ω]×`; exact when `ω` is
    /// constant and orthogonal by construction.
    fn magnus_frame(&self, s: f64, frame: &Mat3<f64>, h: f64) -> Mat3<f64> {
        let c = 0.5 - 3f64.sqrt() / 6.0;
        let w1 = self.darboux_rate_vector(s + c * h);
        let w2 = self.darboux_rate_vector(s + (1.0 - c) * h);
        let omega = (w1 + w2).scale_f64(0.5 * h) + w1.cross(w2).scale_f64(3f64.sqrt() / 12.0 * h * h);
        *frame * rotation_exp(omega)
    }

    fn magnus_node_step(&self, node: Node, h: f64) -> Node {
        let off = 0.5 * 0.6f64.sqrt();
        let tangent_at = |frac: f64| self.magnus_frame(node.s, &node.frame, frac * h).col(0);
        let sum = tangent_at(0.5 - off).scale_f64(5.0) + tangent_at(0.5).scale_f64(8.0) + tangent_at(0.5 + off).scale_f64(5.0);
        Node {
            s: node.s + h,
            position: node.position + sum.scale_f64(h / 18.0),
            frame: self.magnus_frame(node.s, &node.frame, h),
        }
    }

    fn nearest_node(&self, s: f64) -> Node {
        let idx = ((s - self.s_range.0) / self.node_step).floor();
        let idx = if idx.is_finite() { idx.clamp(0.0, (self.nodes.len() - 1) as f64) as usize } else { 0 };
        self.nodes[idx]
    }

    fn centerline_state(&self, s: f64) -> Node {
        self.advance(self.nearest_node(s), s)
    }

    fn centerline_lifted<T: Real>(&self, s: T) -> Vec3<T> {
        let node = self.centerline_state(s.value());
        let t = node.frame.col(0);
        let p = node.position;
        Vec3::new(s.lift(p.x, t.x), s.lift(p.y, t.y), s.lift(p.z, t.z))
    }

    fn darboux_frame_lifted<T: Real>(&self, s: T) -> Mat3<T> {
        let sv = s.value();
        let node = self.centerline_state(sv);
        let rate = self.darboux_rate(sv, &node.frame);
        let col = |i: usize| {
            let (v, d) = (node.frame.col(i), rate.col(i));
            Vec3::new(s.lift(v.x, d.x), s.lift(v.y, d.y), s.lift(v.z, d.z))
        };
        Mat3::from_columns(col(0), col(1), col(2))
    }

    fn check_regularity(&self) -> Result<(), RoadError> {
        let (s0, s1) = self.s_range;
        let w = self.options.lane_half_width;
        let ns = ((s1 - s0) / GRID_PITCH).ceil().max(1.0) as usize;
        for i in 0..=ns {
            let s = s0 + (s1 - s0) * i as f64 / ns as f64;
            for j in 0..GRID_LATERAL_NODES {
                let y = -w + 2.0 * w * j as f64 / (GRID_LATERAL_NODES - 1) as f64;
                let irregular = |source| RoadError::Irregular { s, y, source };
                let jet = self.jet(s, y).map_err(irregular)?;
                let (first, _) = fundamental_forms(&jet).map_err(irregular)?;
                let det = first.det();
                if !(det > REGULARITY_EPS * REGULARITY_EPS) {
                    return Err(irregular(GeomError::Singular { what: "first fundamental form", det }));
                }
                let stretch = jet.xs.dot(self.frame_f64(s).col(0));
                if !(stretch > REGULARITY_EPS) {
                    return Err(RoadError::FoldOver { s, y, stretch });
                }
            }
        }
        Ok(())
    }
}

/// `exp([w]×)` by the Rodrigues formula.
fn rotation_exp(w: Vec3<f64>) -> Mat3<f64> {
    let th2 = w.norm_squared();
    let k = Mat3::skew(w);
    let (a, b) = if th2 < 1e-8 {
        (1.0 - th2 / 6.0 + th2 * th2 / 120.0, 0.5 - th2 / 24.0 + th2 * th2 / 720.0)
    } else {
        let th = th2.sqrt();
        (th.sin() / th, (1.0 - th.cos()) / th2)
    };
    Mat3::identity().add(&k.scale(a)).add(&(k * k).scale(b))
}

fn lift_const<T: Real>(m: &Mat3<f64>) -> Mat3<T> {
    let c = |v: Vec3<f64>| Vec3::from_f64(v);
    Mat3::from_columns(c(m.col(0)), c(m.col(1)), c(m.col(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    use crate::surfaces::spline::CubicSpline;

    fn constant_kappa(k: f64, len: f64) -> CurvatureProfile {
        CurvatureProfile::from_samples(&[0.0, len / 2.0, len], &[k, k, k]).unwrap()
    }

    fn flat_angles(len: f64) -> AngleProfile {
        AngleProfile::from_samples(&[0.0, len], &[0.0; 2], &[0.0; 2], &[0.0; 2]).unwrap()
    }

    #[test]
    fn straight_flat_tait_bryan() {
        let road = RoadSurface::tait_bryan(flat_angles(50.0), 3.0).unwrap();
        let jet = road.evaluate_jet(10.0, 1.5).unwrap();
        assert!((jet.xs - Vec3::E1).max_abs() < 1e-15);
        assert!((jet.xy - Vec3::E2).max_abs() < 1e-15);
        assert!(jet.xss.max_abs() < 1e-15 && jet.xsy.max_abs() < 1e-15);
        assert!((jet.position - Vec3::new(10.0, 1.5, 0.0)).max_abs() < 1e-12);
    }

    #[test]
    fn frenet_stretch() {
        let road = RoadSurface::frenet(constant_kappa(0.1, 20.0), 3.0).unwrap();
        let jet = road.evaluate_jet(0.0, 2.0).unwrap();
        assert!((jet.xs - Vec3::E1.scale_f64(0.8)).max_abs() < 1e-14);
    }

    #[test]
    fn frenet_circle_radius() {
        let k = 0.05;
        let road = RoadSurface::frenet(constant_kappa(k, 2.0 * PI / k), 3.0).unwrap();
        for &s in &[5.0, 30.0, 77.0, 2.0 * PI / k] {
            let p = road.centerline_position(s).unwrap();
            let centre = Vec3::new(0.0, 1.0 / k, 0.0);
            assert_abs_diff_eq!((p - centre).norm(), 1.0 / k, epsilon = 1e-9);
        }
        assert!(road.centerline_position(2.0 * PI / k).unwrap().max_abs() < 1e-6);
    }

    #[test]
    fn darboux_matches_frenet_for_pure_geodesic_curvature() {
        let k = 0.07;
        let s = [0.0, 20.0, 40.0];
        let frenet = RoadSurface::frenet(constant_kappa(k, 40.0), 2.0).unwrap();
        let darboux =
            RoadSurface::darboux(DarbouxProfile::from_samples(&s, &[0.0; 3], &[0.0; 3], &[k; 3]).unwrap(), 2.0)
                .unwrap();
        for &(sv, y) in &[(0.0, 0.0), (3.3, 1.2), (17.0, -2.0), (40.0, 0.5)] {
            let a = frenet.evaluate_jet(sv, y).unwrap();
            let b = darboux.evaluate_jet(sv, y).unwrap();
            for (u, v) in [(a.xs, b.xs), (a.xy, b.xy), (a.xss, b.xss), (a.xsy, b.xsy), (a.normal, b.normal)] {
                assert!((u - v).max_abs() < 1e-12, "{u:?} vs {v:?}");
            }
            assert!((a.position - b.position).max_abs() < 1e-9);
        }
    }

    #[test]
    fn darboux_frame_matches_fine_rk4() {
        let s = [0.0, 10.0, 20.0, 30.0];
        let p = DarbouxProfile::from_samples(&s, &[0.0, 0.05, -0.03, 0.02], &[0.02, -0.04, 0.0, 0.03], &[0.1, 0.0, -0.05, 0.02])
            .unwrap();
        let road = RoadSurface::darboux(p, 2.0).unwrap();
        // reference: plain RK4 on R' = R [ω]× and x' = R e1 with a tiny step
        let mut r = Mat3::<f64>::identity();
        let mut x = Vec3::<f64>::zeros();
        let h = 1e-3;
        let f = |s: f64, r: &Mat3<f64>| road.darboux_rate(s, r);
        for i in 0..27_000 {
            let s0 = i as f64 * h;
            let k1 = f(s0, &r);
            let r2 = r.add(&k1.scale(h / 2.0));
            let k2 = f(s0 + h / 2.0, &r2);
            let r3 = r.add(&k2.scale(h / 2.0));
            let k3 = f(s0 + h / 2.0, &r3);
            let r4 = r.add(&k3.scale(h));
            let k4 = f(s0 + h, &r4);
            x = x + (r.col(0) + r2.col(0).scale_f64(2.0) + r3.col(0).scale_f64(2.0) + r4.col(0)).scale_f64(h / 6.0);
            r = r.add(&k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(h / 6.0));
        }
        let frame = road.centerline_frame(27.0).unwrap();
        assert!(frame.max_abs_diff(&r) < 1e-9, "{}", frame.max_abs_diff(&r));
        assert!((road.centerline_position(27.0).unwrap() - x).max_abs() < 1e-8);
        assert!((frame.transpose() * frame).max_abs_diff(&Mat3::identity()) < 1e-12);
    }

    #[test]
    fn heading_rate_profile_is_exact_integral() {
        let s = [0.0, 10.0, 25.0, 40.0];
        let heading = CubicSpline::with_estimated_slopes(&s, &[0.0, 0.4, 0.2, 1.0]).unwrap();
        let p = CurvatureProfile::HeadingRate(heading.clone());
        for &x in &[0.0, 7.0, 33.3] {
            assert_abs_diff_eq!(p.heading_change(x), heading.value(x), epsilon = 1e-14);
        }
    }

    #[test]
    fn domain_and_regularity_errors() {
        let road = RoadSurface::frenet(constant_kappa(0.1, 20.0), 3.0).unwrap();
        assert!(matches!(road.evaluate_jet(21.0, 0.0), Err(GeomError::Domain { .. })));
        assert!(matches!(road.evaluate_jet(5.0, 3.5), Err(GeomError::Domain { .. })));
        // 1 - κ y changes sign inside the lane
        let err = RoadSurface::frenet(constant_kappa(0.5, 20.0), 3.0).unwrap_err();
        assert!(matches!(err, RoadError::FoldOver { .. }));
    }

    #[test]
    fn tangents_orthogonal_on_tait_bryan() {
        let s = [0.0, 10.0, 20.0, 30.0];
        let p = AngleProfile::from_samples(&s, &[0.0, 0.3, 0.1, -0.2], &[0.0, 0.1, 0.2, 0.0], &[0.1, -0.2, 0.0, 0.3])
            .unwrap();
        let road = RoadSurface::tait_bryan(p, 2.0).unwrap();
        for i in 0..30 {
            let jet = road.evaluate_jet(i as f64, -2.0 + 0.13 * i as f64).unwrap();
            assert!(jet.xs.dot(jet.xy).abs() < 1e-12);
        }
    }

    #[test]
    fn global_round_trip() {
        let s = [0.0, 10.0, 20.0, 30.0];
        let p = AngleProfile::from_samples(&s, &[0.0, 0.3, 0.1, -0.2], &[0.0, 0.1, 0.2, 0.0], &[0.1, -0.2, 0.0, 0.3])
            .unwrap();
        let road = RoadSurface::tait_bryan(p, 2.0).unwrap();
        let pose = ParametricPose::new(13.7, -1.1, 2.5);
        let (x, r) = road.global_pose(&pose).unwrap();
        let back = road.pose_from_global(x, &r, (12.0, 0.0)).unwrap();
        assert_abs_diff_eq!(back.s, pose.s, epsilon = 1e-9);
        assert_abs_diff_eq!(back.y, pose.y, epsilon = 1e-9);
        assert_abs_diff_eq!(back.theta_s, pose.theta_s, epsilon = 1e-9);
    }

    #[test]
    fn flat_global_pose() {
        let road = RoadSurface::tait_bryan(flat_angles(20.0), 3.0).unwrap();
        let (x, r) = road.global_pose(&ParametricPose::new(0.0, 0.0, 0.0)).unwrap();
        assert!(x.max_abs() < 1e-15);
        assert!(r.max_abs_diff(&Mat3::identity()) < 1e-15);
        let (_, r) = road.global_pose(&ParametricPose::new(0.0, 0.0, PI / 2.0)).unwrap();
        assert!((r.col(0) - Vec3::E2).max_abs() < 1e-15);
    }
}
