//! Runs all three controllers on a scenario and prints the metrics table,
//! the same as `nonplanar compare` without writing files.
//!
//! ```text
//! cargo run --release --example compare_controllers -- banked_turn
//! ```

use std::path::Path;

use nonplanar::cli::{compare, metrics_table, summary_rows, Scenario};
use nonplanar::control::ControllerKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "banked_turn".into());
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"));
    let sc = Scenario::load(&path)?;
    let all = [ControllerKind::NonplanarMpc, ControllerKind::PlanarMpc, ControllerKind::Stanley];
    let outcomes = compare(&sc, &all)?;
    print!("{}", metrics_table(&summary_rows(&outcomes)));
    Ok(())
}
