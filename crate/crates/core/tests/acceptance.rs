//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion fails.
//!
//! ```text
//! cargo test --release -p nonplanar --test acceptance -- --nocapture
//! ```

mod common;

use std::time::{Duration, Instant};

use common::*;
use nonplanar::cli::{run_controller, trajectory_csv, RunOutcome};
use nonplanar::control::{ControllerKind, MpcConfig, MpcController, SpeedPlannerConfig};
use nonplanar::dynamics::{gravity_tangential, normal_force};
use nonplanar::geom::{body_basis, theta_s_rate, FundamentalForms, SurfaceJet, Vec3};
use nonplanar::nlp::{try_jacobian, Dual};
use nonplanar::surfaces::{
    frame_from_angles, tait_bryan_to_darboux, AngleProfile, DarbouxProfile, RoadOptions, RoadProfile, RoadSurface,
};
use nonplanar::vehicle::{
    rk4_step, simulate, NonplanarModel, PlanarModel, SimConfig, VehicleModel, VehicleParams, VehicleState,
};
use rand::Rng;

const FRENET_REL_TOL: f64 = 1e-9;
const THETA_RATE_REL_TOL: f64 = 1e-9;
const GRAVITY_TOL: f64 = 1e-10;
const FLAT_FORCE_REL_TOL: f64 = 1e-9;
const LOOP_FORCE_REL_TOL: f64 = 1e-6;
const DARBOUX_CURVATURE_TOL: f64 = 1e-5;
const DARBOUX_JET_TOL: f64 = 1e-6;
const ENERGY_REL_TOL: f64 = 1e-6;
const AD_REL_TOL: f64 = 1e-6;
const EQUILIBRIUM_TOL: f64 = 1e-6;
const BAND: [f64; 2] = [8000.0, 40000.0];
const MAX_LATERAL: f64 = 0.3;
const RUN_WALL_LIMIT: Duration = Duration::from_secs(60);
const MEAN_SOLVE_LIMIT_MS: f64 = 50.0;

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn frenet_generalization() -> Verdict {
    let start = Instant::now();
    let mut rng = rng(1);
    let p = VehicleParams::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..10 {
        let (s, heading) = random_heading(&mut rng, 100.0);
        let (tb, frenet) = heading_pair(&s, &heading, 3.0);
        let general = NonplanarModel { road: &tb, params: p };
        let planar = PlanarModel { road: &frenet, params: p };
        for _ in 0..100 {
            let z = [
                rng.gen_range(0.5..25.0),
                rng.gen_range(0.0..100.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-1.5..1.5),
            ];
            let u = [rng.gen_range(-5.0..5.0), rng.gen_range(-0.5..0.5)];
            let a = general.rates(&z, &u).map_err(|e| e.to_string())?;
            let b = planar.rates(&z, &u).map_err(|e| e.to_string())?;
            for i in 0..4 {
                let scale = a[i].abs().max(b[i].abs()).max(1e-3);
                worst = worst.max((a[i] - b[i]).abs() / scale);
                if !close(a[i], b[i], FRENET_REL_TOL, 1e-12) {
                    failures += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failures == 0 && elapsed < Duration::from_secs(5),
        format!("1000 states, worst rel {worst:.2e}, {failures} mismatches, {:.2} s", elapsed.as_secs_f64()),
    )
}

/// `d/dt atan2(−e2·x_s, e1·x_s)` with the body spinning at `omega3` about
/// the normal and the tangent moving with the parameter rates.
fn theta_rate_quotient(jet: &SurfaceJet<f64>, theta: f64, omega3: f64, sd: f64, yd: f64) -> f64 {
    let (e1, e2, e3) = body_basis(jet, theta);
    let w = e3.scale(omega3);
    let xs_dot = jet.xss.scale(sd) + jet.xsy.scale(yd);
    let num = -e2.dot(jet.xs);
    let den = e1.dot(jet.xs);
    let num_dot = -(w.cross(e2).dot(jet.xs) + e2.dot(xs_dot));
    let den_dot = w.cross(e1).dot(jet.xs) + e1.dot(xs_dot);
    (den * num_dot - num * den_dot) / (num * num + den * den)
}

fn theta_rate_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = rng(2);
    let (mut n, mut failures, mut worst) = (0, 0, 0.0f64);
    while n < 1000 {
        let jet = random_jet(&mut rng, false);
        let theta = rng.gen_range(-3.1..3.1);
        let (_, e2, _) = body_basis(&jet, theta);
        if e2.dot(jet.xs).abs() <= 0.1 {
            continue;
        }
        n += 1;
        let (w, sd, yd) = (rng.gen_range(-2.0..2.0), rng.gen_range(-20.0..20.0), rng.gen_range(-5.0..5.0));
        let a = theta_s_rate(&jet, w, sd, yd).map_err(|e| e.to_string())?;
        let b = theta_rate_quotient(&jet, theta, w, sd, yd);
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1e-3));
        if !close(a, b, THETA_RATE_REL_TOL, 1e-12) {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        failures == 0 && elapsed < Duration::from_secs(1),
        format!("{n} jets, worst rel {worst:.2e}, {failures} mismatches, {:.3} s", elapsed.as_secs_f64()),
    )
}

fn gravity_projection() -> Verdict {
    let mut rng = rng(3);
    let g = 9.81;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let jet = random_jet(&mut rng, true);
        let theta = rng.gen_range(-3.1..3.1);
        let beta: f64 = rng.gen_range(-1.5..1.5);
        let forms = FundamentalForms::at_pose(&jet, theta).map_err(|e| e.to_string())?;
        let (e1, e2, _) = body_basis(&jet, theta);
        let oracle = -g * Vec3::E3.dot(e1.scale(beta.cos()) + e2.scale(beta.sin()));
        worst = worst.max((gravity_tangential(&jet, &forms, beta, g) - oracle).abs());
    }
    check(worst <= GRAVITY_TOL, format!("1000 orthogonal jets, worst abs {worst:.2e}"))
}

fn normal_force_analytics() -> Verdict {
    let p = VehicleParams::default();
    let flat = flat_road(50.0, 3.0);
    let jet = flat.evaluate_jet(10.0, 0.0).map_err(|e| e.to_string())?;
    let forms = FundamentalForms::at_pose(&jet, 0.0).map_err(|e| e.to_string())?;
    let f_flat = normal_force(&jet, &forms, 0.0, 10.0, p.mass, p.gravity).map_err(|e| e.to_string())?;

    // pitch grows at 1/r, so the lowest point of the loop is where it is zero
    let r = 20.0;
    let z = [0.0; 2];
    let loop_profile = AngleProfile::from_samples(&[0.0, 60.0], &z, &[-1.0, 2.0], &z).unwrap();
    let road = RoadSurface::tait_bryan(loop_profile, 3.0).map_err(|e| e.to_string())?;
    let jet = road.evaluate_jet(r, 0.0).map_err(|e| e.to_string())?;
    let forms = FundamentalForms::at_pose(&jet, 0.0).map_err(|e| e.to_string())?;
    let v = 10.0;
    let f_loop = normal_force(&jet, &forms, 0.0, v, p.mass, p.gravity).map_err(|e| e.to_string())?;
    let centripetal = p.mass * (v * v / r + p.gravity);

    let ok = close(f_flat, 22_592.43, FLAT_FORCE_REL_TOL, 0.0)
        && close(f_loop, 34_107.43, LOOP_FORCE_REL_TOL, 0.0)
        && close(f_loop, centripetal, LOOP_FORCE_REL_TOL, 0.0);
    check(ok, format!("flat {f_flat:.4} N, loop bottom {f_loop:.4} N (oracle {centripetal:.4} N)"))
}

fn darboux_tait_bryan() -> Verdict {
    let angles = |s: f64| {
        [
            [0.3 * (0.1 * s).sin(), 0.03 * (0.1 * s).cos()],
            [0.2 * (0.07 * s).cos(), -0.014 * (0.07 * s).sin()],
            [0.25 * (0.13 * s + 1.0).sin(), 0.0325 * (0.13 * s + 1.0).cos()],
        ]
    };
    let h = 1e-5;
    let mut worst_k = 0.0f64;
    for i in 0..200 {
        let s = 0.37 * i as f64;
        let [a, b, c] = angles(s);
        let k = tait_bryan_to_darboux(a, b, c);
        let rp = {
            let [a, b, c] = angles(s + h);
            frame_from_angles(a[0], b[0], c[0])
        };
        let rm = {
            let [a, b, c] = angles(s - h);
            frame_from_angles(a[0], b[0], c[0])
        };
        let r = frame_from_angles(a[0], b[0], c[0]);
        let dr = (rp.add(&rm.scale(-1.0))).scale(0.5 / h);
        let w = r.transpose() * dr;
        let fd = [w.get(2, 1), w.get(0, 2), w.get(1, 0)];
        for j in 0..3 {
            worst_k = worst_k.max((fd[j] - k[j]).abs());
        }
    }

    let s: Vec<f64> = (0..=60).map(|i| i as f64).collect();
    let sample = |j: usize| s.iter().map(|&x| angles(x)[j][0]).collect::<Vec<_>>();
    let profile = AngleProfile::from_samples(&s, &sample(0), &sample(1), &sample(2)).unwrap();
    let tb = RoadSurface::tait_bryan(profile.clone(), 3.0).map_err(|e| e.to_string())?;
    let opts = RoadOptions { lane_half_width: 3.0, ..Default::default() };
    let db = RoadSurface::new(RoadProfile::Darboux(DarbouxProfile::FromAngles(profile)), opts)
        .map_err(|e| e.to_string())?;
    let mut worst_jet = 0.0f64;
    for i in 0..=120 {
        for &y in &[-2.9, -1.0, 0.0, 1.7, 2.9] {
            let sq = 0.5 * i as f64;
            let a = tb.evaluate_jet(sq, y).map_err(|e| e.to_string())?;
            let b = db.evaluate_jet(sq, y).map_err(|e| e.to_string())?;
            for (u, v) in [
                (a.position, b.position),
                (a.xs, b.xs),
                (a.xy, b.xy),
                (a.xss, b.xss),
                (a.xsy, b.xsy),
                (a.xyy, b.xyy),
                (a.normal, b.normal),
            ] {
                worst_jet = worst_jet.max((u - v).max_abs());
            }
        }
    }
    check(
        worst_k <= DARBOUX_CURVATURE_TOL && worst_jet <= DARBOUX_JET_TOL,
        format!("curvatures vs finite differences {worst_k:.2e}, jets {worst_jet:.2e}"),
    )
}

fn energy_conservation() -> Verdict {
    let road = shipped_road("hill_climb");
    let p = VehicleParams::default();
    let model = NonplanarModel { road: &road, params: p };
    let energy = |z: &[f64; 4]| -> Result<f64, String> {
        let jet = road.evaluate_jet(z[1], z[2]).map_err(|e| e.to_string())?;
        Ok(0.5 * p.mass * z[0] * z[0] + p.mass * p.gravity * jet.position.z)
    };
    let mut z = [14.0, 20.0, 0.4, 0.0];
    let e0 = energy(&z)?;
    let dt = 1e-3;
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        z = rk4_step(|z| model.rates(z, &[0.0, 0.0]), &z, dt).map_err(|e| e.to_string())?;
        worst = worst.max((energy(&z)? - e0).abs() / e0);
    }
    check(worst < ENERGY_REL_TOL, format!("max |ΔE|/E {worst:.2e} over 10 s, final v {:.3} m/s, s {:.2} m", z[0], z[1]))
}

fn ad_correctness() -> Verdict {
    let p = VehicleParams::default();
    let mut rng = rng(7);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for name in SHIPPED {
        let road = shipped_road(name);
        let model = NonplanarModel { road: &road, params: p };
        let (s0, s1) = road.s_range();
        let lane = road.lane_half_width();
        for _ in 0..100 {
            let x = [
                rng.gen_range(1.0..20.0),
                rng.gen_range(s0 + 1.0..s1 - 1.0),
                rng.gen_range(-0.8 * lane..0.8 * lane),
                rng.gen_range(-0.6..0.6),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-0.45..0.45),
            ];
            let f = |x: &[f64; 6]| model.rates(&[x[0], x[1], x[2], x[3]], &[x[4], x[5]]);
            let (_, jac) = try_jacobian(
                |d: &[Dual<6>; 6]| model.rates(&[d[0], d[1], d[2], d[3]], &[d[4], d[5]]).map(|r| r.to_vec()),
                &x,
            )
            .map_err(|e| e.to_string())?;
            let h = 1e-6;
            for col in 0..6 {
                let (mut xp, mut xm) = (x, x);
                xp[col] += h;
                xm[col] -= h;
                let (fp, fm) = (f(&xp).map_err(|e| e.to_string())?, f(&xm).map_err(|e| e.to_string())?);
                for row in 0..4 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    let ad = jac[(row, col)];
                    worst = worst.max((ad - fd).abs() / ad.abs().max(1.0));
                    if !close(ad, fd, AD_REL_TOL, AD_REL_TOL) {
                        failures += 1;
                    }
                }
            }
        }
    }
    check(failures == 0, format!("500 states on 5 roads, worst rel {worst:.2e}, {failures} mismatches"))
}

fn closed_loop_equilibrium() -> Verdict {
    let road = flat_road(120.0, 4.0);
    let p = VehicleParams::default();
    let cfg = MpcConfig { v_ref: 10.0, ..Default::default() };
    let mut ctl = MpcController::new(&road, p, cfg, Some(SpeedPlannerConfig::default()));
    let sim = SimConfig { dt: 0.05, duration: 5.0, ..Default::default() };
    let traj = simulate(&road, &p, VehicleState::new(10.0, 0.0, 0.0, 0.0), &mut ctl, &sim).map_err(|e| e.to_string())?;
    let worst = traj
        .rows
        .iter()
        .map(|r| r.state.pose.y.abs().max(r.state.pose.theta_s.abs()).max((r.state.v - 10.0).abs()))
        .fold(0.0, f64::max);
    check(worst <= EQUILIBRIUM_TOL && traj.rows.len() == 100, format!("{} ticks, worst deviation {worst:.2e}", traj.rows.len()))
}

fn timed_run(name: &str, kind: ControllerKind) -> (RunOutcome, Duration) {
    let sc = scenario(name);
    let road = sc.load_road().expect("road");
    let start = Instant::now();
    let out = run_controller(&sc, &road, kind);
    (out, start.elapsed())
}

struct CorpusRuns {
    loop_nonplanar: (RunOutcome, Duration),
    loop_planar: (RunOutcome, Duration),
    banked_nonplanar: (RunOutcome, Duration),
    banked_stanley: (RunOutcome, Duration),
}

fn qualitative_reproduction(runs: &CorpusRuns) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (label, (out, _)) in [("loop", &runs.loop_nonplanar), ("banked", &runs.banked_nonplanar)] {
        let m = &out.metrics;
        let pass = out.divergence.is_none() && m.band_violations == 0 && m.max_abs_y < MAX_LATERAL;
        ok &= pass;
        notes.push(format!("(a) {label}: {} band violations, max|y| {:.4} m", m.band_violations, m.max_abs_y));
    }
    let low = runs.loop_planar.0.trajectory.rows.iter().filter(|r| r.normal_force < BAND[0]).count();
    ok &= low >= 1;
    notes.push(format!("(b) planar loop: {low} steps below {} N", BAND[0]));
    let (np, st) = (runs.banked_nonplanar.0.metrics.rms_y, runs.banked_stanley.0.metrics.rms_y);
    ok &= st > np;
    notes.push(format!("(c) banked rms|y| stanley {st:.4} vs nonplanar {np:.4}"));
    let slowest = [&runs.loop_nonplanar, &runs.loop_planar, &runs.banked_nonplanar, &runs.banked_stanley]
        .iter()
        .map(|r| r.1)
        .max()
        .unwrap();
    ok &= slowest <= RUN_WALL_LIMIT;
    notes.push(format!("slowest run {:.1} s", slowest.as_secs_f64()));
    check(ok, notes.join("; "))
}

fn solve_time(runs: &CorpusRuns) -> Verdict {
    let np = runs.loop_nonplanar.0.metrics.mean_solve_ms.unwrap_or(f64::NAN);
    let pl = runs.loop_planar.0.metrics.mean_solve_ms.unwrap_or(f64::NAN);
    check(np <= MEAN_SOLVE_LIMIT_MS && pl < np, format!("loop mean solve: nonplanar {np:.2} ms, planar {pl:.2} ms"))
}

fn determinism() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in SHIPPED {
        let sc = scenario(name);
        let road = sc.load_road().map_err(|e| e.to_string())?;
        let a = trajectory_csv(&run_controller(&sc, &road, sc.controller).trajectory, false);
        let b = trajectory_csv(&run_controller(&sc, &road, sc.controller).trajectory, false);
        let same = a == b && a.lines().count() > 1;
        ok &= same;
        notes.push(format!("{name} {}", if same { "identical" } else { "DIFFERENT" }));
    }
    check(ok, notes.join(", "))
}

fn report(id: usize, title: &str, v: &Verdict) -> bool {
    match v {
        Ok(d) => println!("PASS {id:>2} {title}: {d}"),
        Err(d) => println!("FAIL {id:>2} {title}: {d}"),
    }
    v.is_ok()
}

// Criteria run sequentially in one test so the solve-time measurements are
// not disturbed by other tests running in parallel.
#[test]
fn acceptance_criteria() {
    println!();
    let mut passed = Vec::new();
    passed.push(report(1, "Frenet generalization", &frenet_generalization()));
    passed.push(report(2, "heading-rate formula equivalence", &theta_rate_equivalence()));
    passed.push(report(3, "gravity projection", &gravity_projection()));
    passed.push(report(4, "normal force analytics", &normal_force_analytics()));
    passed.push(report(5, "Darboux and Tait-Bryan agreement", &darboux_tait_bryan()));
    passed.push(report(6, "energy conservation", &energy_conservation()));
    passed.push(report(7, "AD correctness", &ad_correctness()));
    passed.push(report(8, "closed-loop equilibrium", &closed_loop_equilibrium()));
    let runs = CorpusRuns {
        loop_nonplanar: timed_run("vertical_loop", ControllerKind::NonplanarMpc),
        loop_planar: timed_run("vertical_loop", ControllerKind::PlanarMpc),
        banked_nonplanar: timed_run("banked_turn", ControllerKind::NonplanarMpc),
        banked_stanley: timed_run("banked_turn", ControllerKind::Stanley),
    };
    passed.push(report(9, "qualitative reproduction", &qualitative_reproduction(&runs)));
    passed.push(report(10, "solve time", &solve_time(&runs)));
    passed.push(report(11, "determinism", &determinism()));
    let failed: Vec<usize> = passed.iter().enumerate().filter(|(_, &ok)| !ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
