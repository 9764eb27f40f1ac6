//! Nonplanar MPC pulling the car back to the centerline of a straight, level
//! road after starting 1 m off and 2 m/s slow.
//!
//! ```text
//! cargo run --release --example mpc_flat
//! ```

use nonplanar::control::{MpcConfig, MpcController, SpeedPlannerConfig};
use nonplanar::surfaces::{AngleProfile, RoadSurface};
use nonplanar::vehicle::{simulate, SimConfig, VehicleParams, VehicleState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = [0.0; 2];
    let road = RoadSurface::tait_bryan(AngleProfile::from_samples(&[0.0, 200.0], &z, &z, &z)?, 4.0)?;
    let p = VehicleParams::default();
    let cfg = MpcConfig { v_ref: 10.0, ..Default::default() };
    let mut ctl = MpcController::new(&road, p, cfg, Some(SpeedPlannerConfig::default()));
    let sim = SimConfig { dt: 0.05, duration: 6.0, ..Default::default() };
    let traj = simulate(&road, &p, VehicleState::new(8.0, 0.0, 1.0, 0.0), &mut ctl, &sim)?;

    println!("{:>5} {:>7} {:>8} {:>8} {:>7} {:>8} {:>5} {:>8}", "t", "v", "y", "θˢ", "a", "γ", "iter", "ms");
    for r in traj.rows.iter().step_by(5) {
        println!(
            "{:5.2} {:7.3} {:8.4} {:8.4} {:7.3} {:8.4} {:5} {:8.2}",
            r.t, r.state.v, r.state.pose.y, r.state.pose.theta_s, r.input.accel, r.input.steer, r.iterations, r.solve_ms
        );
    }
    Ok(())
}
