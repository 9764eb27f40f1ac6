//! Loads every shipped road and prints its centerline, frame angles of travel
//! and Darboux curvatures at a few stations.
//!
//! ```text
//! cargo run --example road_surfaces
//! ```

use std::path::Path;

use nonplanar::surfaces::load_road;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/roads");
    for name in ["flat_oval", "hill_climb", "vertical_loop", "banked_turn", "off_camber"] {
        let road = load_road(&dir.join(format!("{name}.toml")))?;
        println!("{name}: {} road, {:.1} m, lane ±{} m", road.kind(), road.length(), road.lane_half_width());
        println!("  {:>7} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "s", "x", "y", "z", "κˢ", "κʸ", "κⁿ");
        let (s0, s1) = road.s_range();
        for i in 0..=6 {
            let s = s0 + (s1 - s0) * i as f64 / 6.0;
            let p = road.centerline_position(s)?;
            let [[ks, _], [ky, _], [kn, _]] = road.darboux_curvatures(s);
            println!("  {s:7.1} {:9.2} {:9.2} {:9.2} {ks:9.4} {ky:9.4} {kn:9.4}", p.x, p.y, p.z);
        }
    }
    Ok(())
}
