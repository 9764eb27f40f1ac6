//! Regenerates the road files of the shipped scenario corpus.
//!
//! ```text
//! cargo run --example generate_corpus -- crates/core/scenarios/roads
//! ```
//!
//! Every road is sampled at 1 m breakpoints from a closed-form profile.
//! Curvature, slope and bank changes use linear ramps of their rate so the
//! splines stay smooth.

use std::f64::consts::PI;
use std::path::PathBuf;

use nonplanar::surfaces::{tait_bryan_to_darboux, Breakpoint, RoadFile, RoadKind};

const COM_HEIGHT: f64 = 0.592;

/// Rate profile that ramps linearly from 0 to `peak` over `ramp` metres
/// starting at `start`, holds, then ramps back to 0. Its integral is
/// `peak * span`.
#[derive(Clone, Copy)]
struct Trapezoid {
    start: f64,
    span: f64,
    ramp: f64,
    peak: f64,
}

impl Trapezoid {
    fn knots(&self) -> [f64; 4] {
        assert!(self.span >= self.ramp);
        [self.start, self.start + self.ramp, self.start + self.span, self.start + self.span + self.ramp]
    }

    fn rate(&self, s: f64) -> f64 {
        let [k0, k1, k2, k3] = self.knots();
        let w = if s <= k0 || s >= k3 {
            0.0
        } else if s < k1 {
            (s - k0) / self.ramp
        } else if s <= k2 {
            1.0
        } else {
            (k3 - s) / self.ramp
        };
        w * self.peak
    }

    /// Integral of the rate from `-∞` to `s` (trapezoid rule is exact on
    /// each linear piece).
    fn integral(&self, s: f64) -> f64 {
        let first = self.start.min(s);
        let mut pts = vec![first];
        pts.extend(self.knots().into_iter().filter(|&k| k > first && k < s));
        pts.push(s);
        pts.windows(2).map(|w| 0.5 * (self.rate(w[0]) + self.rate(w[1])) * (w[1] - w[0])).sum()
    }
}

/// C1 step from 0 to 1 over `[start, start + len]`.
fn blend(s: f64, start: f64, len: f64) -> f64 {
    let t = ((s - start) / len).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn sample(length: f64) -> Vec<f64> {
    (0..=length.round() as usize).map(|i| i as f64).collect()
}

fn angle_road(length: f64, lane: f64, f: impl Fn(f64) -> [f64; 3]) -> RoadFile {
    RoadFile {
        kind: RoadKind::TaitBryan,
        anchor: [0.0, 0.0, 0.0],
        com_height: COM_HEIGHT,
        lane_half_width: lane,
        initial_angles: None,
        breakpoints: sample(length)
            .into_iter()
            .map(|s| {
                let [a, b, c] = f(s);
                Breakpoint::angles(s, a, b, c)
            })
            .collect(),
    }
}

/// Two straights joined by two 180° turns of radius 30 m.
fn flat_oval() -> RoadFile {
    let r = 30.0;
    let turn = |start| Trapezoid { start, span: PI * r, ramp: 10.0, peak: 1.0 / r };
    let (t1, t2) = (turn(40.0), turn(40.0 + PI * r + 10.0 + 80.0));
    let length = t2.start + PI * r + 10.0 + 60.0;
    RoadFile {
        kind: RoadKind::Frenet,
        anchor: [0.0, 0.0, 0.0],
        com_height: COM_HEIGHT,
        lane_half_width: 4.0,
        initial_angles: None,
        breakpoints: sample(length).into_iter().map(|s| Breakpoint::curvature(s, t1.rate(s) + t2.rate(s))).collect(),
    }
}

/// 20 % grade climb with 40 m vertical curves at the sag and the crest.
fn hill_climb() -> RoadFile {
    let grade = 0.2f64.atan();
    let sag = Trapezoid { start: 30.0, span: 20.0, ramp: 20.0, peak: grade / 20.0 };
    let crest = Trapezoid { start: 130.0, span: 20.0, ramp: 20.0, peak: -grade / 20.0 };
    angle_road(260.0, 4.0, |s| [0.0, sag.integral(s) + crest.integral(s), 0.0])
}

/// Full vertical loop of radius 20 m entered after a 40 m straight, with
/// 10 m transitions at entry and exit. The exit lane overlaps the entry; the
/// simulation has no notion of collision.
fn vertical_loop() -> RoadFile {
    let r = 20.0;
    let pitch = Trapezoid { start: 40.0, span: 2.0 * PI * r, ramp: 10.0, peak: 1.0 / r };
    angle_road(320.0, 4.0, |s| [0.0, pitch.integral(s), 0.0])
}

/// 180° left turn of radius 25 m banked 30° toward the inside.
fn banked_turn() -> RoadFile {
    let r = 25.0;
    let bank = 30f64.to_radians();
    let turn = Trapezoid { start: 40.0, span: PI * r, ramp: 15.0, peak: 1.0 / r };
    let out = turn.start + PI * r;
    // negative bank lowers the left (inner) edge
    angle_road(260.0, 4.0, |s| [turn.integral(s), 0.0, -bank * (blend(s, 25.0, 20.0) - blend(s, out, 20.0))])
}

/// 90° left turn of radius 40 m whose 8° bank tilts toward the outside,
/// written as a Darboux road.
fn off_camber() -> RoadFile {
    let r = 40.0;
    let bank = 8f64.to_radians();
    let turn = Trapezoid { start: 40.0, span: 0.5 * PI * r, ramp: 15.0, peak: 1.0 / r };
    let out = turn.start + 0.5 * PI * r;
    let h = 1e-4;
    let angles = |s: f64| [turn.integral(s), 0.0, bank * (blend(s, 30.0, 20.0) - blend(s, out, 20.0))];
    let breakpoints = sample(200.0)
        .into_iter()
        .map(|s| {
            let (p, m, c) = (angles(s + h), angles(s - h), angles(s));
            let d = |i: usize| [c[i], (p[i] - m[i]) / (2.0 * h)];
            let [ks, ky, kn] = tait_bryan_to_darboux(d(0), d(1), d(2));
            Breakpoint::darboux(s, ks, ky, kn)
        })
        .collect();
    RoadFile {
        kind: RoadKind::Darboux,
        anchor: [0.0, 0.0, 0.0],
        com_height: COM_HEIGHT,
        lane_half_width: 4.0,
        initial_angles: Some(angles(0.0)),
        breakpoints,
    }
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/core/scenarios/roads".into()));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let roads = [
        ("flat_oval", flat_oval()),
        ("hill_climb", hill_climb()),
        ("vertical_loop", vertical_loop()),
        ("banked_turn", banked_turn()),
        ("off_camber", off_camber()),
    ];
    for (name, road) in roads {
        let path = dir.join(format!("{name}.toml"));
        road.build().unwrap_or_else(|e| panic!("{name}: {e}"));
        std::fs::write(&path, road.to_toml()).expect("write road file");
        println!("wrote {}", path.display());
    }
}
