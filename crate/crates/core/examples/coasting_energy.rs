//! Coasts up the shipped hill with zero inputs and tracks kinetic plus
//! potential energy, which the kinematic model keeps constant.
//!
//! ```text
//! cargo run --example coasting_energy
//! ```

use std::path::Path;

use nonplanar::surfaces::load_road;
use nonplanar::vehicle::{rk4_step, NonplanarModel, VehicleModel, VehicleParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let road = load_road(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/roads/hill_climb.toml"))?;
    let p = VehicleParams::default();
    let model = NonplanarModel { road: &road, params: p };
    let energy = |z: &[f64; 4]| -> Result<f64, Box<dyn std::error::Error>> {
        let h = road.evaluate_jet(z[1], z[2])?.position.z;
        Ok(0.5 * p.mass * z[0] * z[0] + p.mass * p.gravity * h)
    };

    let mut z = [14.0, 20.0, 0.4, 0.0];
    let e0 = energy(&z)?;
    let dt = 1e-3;
    println!("{:>5} {:>8} {:>8} {:>8} {:>12}", "t", "v", "s", "z", "ΔE/E");
    for k in 0..=10_000 {
        if k % 1000 == 0 {
            let h = road.evaluate_jet(z[1], z[2])?.position.z;
            println!("{:5.1} {:8.3} {:8.2} {h:8.3} {:12.2e}", k as f64 * dt, z[0], z[1], (energy(&z)? - e0) / e0);
        }
        z = rk4_step(|z| model.rates(z, &[0.0, 0.0]), &z, dt)?;
    }
    Ok(())
}
