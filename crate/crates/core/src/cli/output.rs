//! Trajectory CSV and run metrics.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::vehicle::Trajectory;

pub const CSV_HEADER: &str = "t,s,y,theta_s,v,beta,a_t,gamma,F_N,x1,x2,x3,v_ref_adj,solve_ms,solver_status";

/// One row per control tick. With `timing` off the `solve_ms` column is
/// written as `NaN` so repeated runs are byte-identical.
pub fn trajectory_csv(traj: &Trajectory, timing: bool) -> String {
    let mut out = String::with_capacity(160 * (traj.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &traj.rows {
        let p = &r.state.pose;
        let solve = if timing { r.solve_ms } else { f64::NAN };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            p.s,
            p.y,
            p.theta_s,
            r.state.v,
            r.beta,
            r.input.accel,
            r.input.steer,
            r.normal_force,
            r.position[0],
            r.position[1],
            r.position[2],
            r.v_ref_adj,
            solve,
            r.status
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub steps: usize,
    pub rms_y: f64,
    pub max_abs_y: f64,
    /// RMS of `v − v_ref_adj`.
    pub rms_speed_error: f64,
    pub min_normal_force: f64,
    pub max_normal_force: f64,
    /// Steps with the normal force outside the band.
    pub band_violations: usize,
    /// Steps with a non-positive normal force.
    pub lost_contact: usize,
    /// `None` for controllers that do not solve an optimisation problem.
    pub mean_solve_ms: Option<f64>,
    pub max_solve_ms: Option<f64>,
    pub non_converged: usize,
}

impl RunMetrics {
    pub fn from_trajectory(traj: &Trajectory, band: [f64; 2]) -> Self {
        let rows = &traj.rows;
        let n = rows.len();
        let rms = |f: &dyn Fn(&crate::vehicle::LogRow) -> f64| {
            if n == 0 {
                0.0
            } else {
                (rows.iter().map(|r| f(r).powi(2)).sum::<f64>() / n as f64).sqrt()
            }
        };
        let solves: Vec<f64> = rows.iter().map(|r| r.solve_ms).filter(|x| x.is_finite()).collect();
        let forces = rows.iter().map(|r| r.normal_force);
        Self {
            steps: n,
            rms_y: rms(&|r| r.state.pose.y),
            max_abs_y: rows.iter().map(|r| r.state.pose.y.abs()).fold(0.0, f64::max),
            rms_speed_error: rms(&|r| r.state.v - r.v_ref_adj),
            min_normal_force: forces.clone().fold(f64::INFINITY, f64::min),
            max_normal_force: forces.fold(f64::NEG_INFINITY, f64::max),
            band_violations: rows.iter().filter(|r| r.normal_force < band[0] || r.normal_force > band[1]).count(),
            lost_contact: rows.iter().filter(|r| r.normal_force <= 0.0).count(),
            mean_solve_ms: (!solves.is_empty()).then(|| solves.iter().sum::<f64>() / solves.len() as f64),
            max_solve_ms: solves.iter().copied().reduce(f64::max),
            non_converged: rows
                .iter()
                .filter(|r| r.status == "max_iterations" || r.status == "line_search_failure")
                .count(),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.2}"))
}

/// Plain-text table with one row per labelled run.
pub fn metrics_table(rows: &[(String, Result<RunMetrics, String>)]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>6} {:>8} {:>8} {:>9} {:>10} {:>10} {:>6} {:>6} {:>9} {:>9}",
        "controller", "steps", "rms|y|", "max|y|", "rms dv", "min F_N", "max F_N", "band", "lost", "mean ms", "max ms"
    );
    for (label, m) in rows {
        match m {
            Ok(m) => {
                let _ = writeln!(
                    out,
                    "{:<16} {:>6} {:>8.4} {:>8.4} {:>9.4} {:>10.0} {:>10.0} {:>6} {:>6} {:>9} {:>9}",
                    label,
                    m.steps,
                    m.rms_y,
                    m.max_abs_y,
                    m.rms_speed_error,
                    m.min_normal_force,
                    m.max_normal_force,
                    m.band_violations,
                    m.lost_contact,
                    opt(m.mean_solve_ms),
                    opt(m.max_solve_ms)
                );
            }
            Err(e) => {
                let _ = writeln!(out, "{label:<16} failed: {e}");
            }
        }
    }
    out
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map_or("out".into(), |n| n.to_string_lossy().into_owned());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::{ControlInput, LogRow, VehicleState};

    fn row(t: f64, y: f64, f: f64) -> LogRow {
        LogRow {
            t,
            state: VehicleState::new(10.0, t * 10.0, y, 0.0),
            input: ControlInput::default(),
            beta: 0.0,
            normal_force: f,
            position: [t * 10.0, y, 0.0],
            v_ref_adj: 10.0,
            solve_ms: 1.5,
            status: "converged",
            iterations: 1,
        }
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory { rows: vec![row(0.0, 0.5, 22000.0)] };
        let csv = trajectory_csv(&traj, false);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("0,0,0.5,0,10,0,0,0,22000,0,0.5,0,10,NaN,converged"));
        assert!(trajectory_csv(&traj, true).contains(",1.5,converged"));
    }

    #[test]
    fn metrics_counts() {
        let traj = Trajectory { rows: vec![row(0.0, 0.3, 22000.0), row(0.05, -0.4, 5000.0), row(0.1, 0.0, -10.0)] };
        let m = RunMetrics::from_trajectory(&traj, [8000.0, 40000.0]);
        assert_eq!(m.steps, 3);
        assert_eq!(m.band_violations, 2);
        assert_eq!(m.lost_contact, 1);
        assert_eq!(m.max_abs_y, 0.4);
        assert!((m.rms_y - (0.25f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!((m.min_normal_force, m.max_normal_force), (-10.0, 22000.0));
        assert_eq!(m.mean_solve_ms, Some(1.5));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
