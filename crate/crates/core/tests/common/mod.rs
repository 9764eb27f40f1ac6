#![allow(dead_code)]

use std::path::PathBuf;

use nonplanar::cli::Scenario;
use nonplanar::geom::{SurfaceJet, Vec3};
use nonplanar::surfaces::{AngleProfile, CurvatureProfile, CubicSpline, RoadSurface};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SHIPPED: [&str; 5] = ["flat_oval", "hill_climb", "vertical_loop", "banked_turn", "off_camber"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

pub fn road_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/roads").join(format!("{name}.toml"))
}

pub fn scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn shipped_road(name: &str) -> RoadSurface {
    nonplanar::surfaces::load_road(&road_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Straight, level Tait-Bryan road of the given length.
pub fn flat_road(length: f64, lane: f64) -> RoadSurface {
    let z = [0.0; 2];
    RoadSurface::tait_bryan(AngleProfile::from_samples(&[0.0, length], &z, &z, &z).unwrap(), lane).unwrap()
}

/// Constant-curvature planar road: heading grows linearly.
pub fn circle_road(kappa: f64, length: f64, lane: f64) -> RoadSurface {
    let z = [0.0; 2];
    let p = AngleProfile::from_samples(&[0.0, length], &[0.0, kappa * length], &z, &z).unwrap();
    RoadSurface::tait_bryan(p, lane).unwrap()
}

/// Random heading samples every 10 m; the curvature is the spline slope.
pub fn random_heading(rng: &mut ChaCha8Rng, length: f64) -> (Vec<f64>, Vec<f64>) {
    let s: Vec<f64> = (0..=(length / 10.0) as usize).map(|i| i as f64 * 10.0).collect();
    let mut a = 0.0;
    let heading = s
        .iter()
        .map(|_| {
            let h = a;
            a += rng.gen_range(-0.6..0.6);
            h
        })
        .collect();
    (s, heading)
}

/// The same heading spline seen as a planar angle road and as a Frenet road.
pub fn heading_pair(s: &[f64], heading: &[f64], lane: f64) -> (RoadSurface, RoadSurface) {
    let z = vec![0.0; s.len()];
    let angles = AngleProfile::from_samples(s, heading, &z, &z).unwrap();
    let tb = RoadSurface::tait_bryan(angles, lane).unwrap();
    let spline = CubicSpline::with_estimated_slopes(s, heading).unwrap();
    let frenet = RoadSurface::frenet(CurvatureProfile::HeadingRate(spline), lane).unwrap();
    (tb, frenet)
}

pub fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3<f64> {
    Vec3::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// Random regular jet; with `orthogonal` the tangents are made perpendicular.
pub fn random_jet(rng: &mut ChaCha8Rng, orthogonal: bool) -> SurfaceJet<f64> {
    loop {
        let xs = random_vec(rng, 2.0);
        let mut xy = random_vec(rng, 2.0);
        if orthogonal {
            xy = xy - xs.scale(xy.dot(xs) / xs.dot(xs));
        }
        let cross = xs.cross(xy).norm();
        if cross < 0.2 || xs.norm() < 0.3 || xy.norm() < 0.3 {
            continue;
        }
        let p = random_vec(rng, 10.0);
        let (a, b, c) = (random_vec(rng, 1.0), random_vec(rng, 1.0), random_vec(rng, 1.0));
        return SurfaceJet::new(p, xs, xy, a, b, c).unwrap();
    }
}

/// `|a − b| ≤ rel·max(|a|, |b|) + abs`.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}
