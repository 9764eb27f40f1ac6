//! Speed planner on the shipped vertical loop: the desired 10 m/s is raised
//! ahead of the loop so the normal force stays inside the band at the top.
//!
//! ```text
//! cargo run --release --example loop_speed_planner
//! ```

use std::path::Path;

use nonplanar::cli::Scenario;
use nonplanar::control::{MpcConfig, MpcController, MpcModel};
use nonplanar::vehicle::{simulate, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/vertical_loop.toml"))?;
    let road = sc.load_road()?;
    let cfg = MpcConfig { v_ref: sc.v_ref, dt: sc.control_period, model: MpcModel::Nonplanar, ..sc.mpc };
    let mut ctl = MpcController::new(&road, sc.vehicle, cfg, Some(sc.speed_planner));
    let sim = SimConfig { dt: sc.control_period, duration: sc.duration, ..Default::default() };
    let traj = simulate(&road, &sc.vehicle, sc.initial, &mut ctl, &sim)?;

    let [lo, hi] = sc.speed_planner.force_band;
    println!("force band [{lo}, {hi}] N");
    println!("{:>5} {:>7} {:>7} {:>7} {:>7} {:>9}", "t", "s", "z", "v_ref", "v", "F_N");
    for r in traj.rows.iter().step_by(10) {
        println!(
            "{:5.1} {:7.1} {:7.2} {:7.2} {:7.2} {:9.0}",
            r.t, r.state.pose.s, r.position[2], r.v_ref_adj, r.state.v, r.normal_force
        );
    }
    let outside = traj.rows.iter().filter(|r| r.normal_force < lo || r.normal_force > hi).count();
    println!("{outside} of {} ticks outside the band", traj.rows.len());
    Ok(())
}
