//! Normal force around the shipped vertical loop at a few speeds. Below the
//! critical speed the force at the top goes negative and the car would fall.
//!
//! ```text
//! cargo run --example normal_force
//! ```

use std::path::Path;

use nonplanar::surfaces::load_road;
use nonplanar::vehicle::{vehicle_normal_force, VehicleParams, VehicleState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let road = load_road(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/roads/vertical_loop.toml"))?;
    let p = VehicleParams::default();
    let (s0, s1) = road.s_range();
    let speeds = [8.0, 12.0, 16.0, 20.0];
    print!("{:>7} {:>7}", "s", "z");
    for v in speeds {
        print!(" {:>9}", format!("{v} m/s"));
    }
    println!();
    for i in 0..=24 {
        let s = s0 + (s1 - s0) * i as f64 / 24.0;
        print!("{s:7.1} {:7.2}", road.centerline_position(s)?.z);
        for v in speeds {
            let f = vehicle_normal_force(&road, &VehicleState::new(v, s, 0.0, 0.0), 0.0, &p)?;
            print!(" {f:9.0}");
        }
        println!();
    }
    Ok(())
}
