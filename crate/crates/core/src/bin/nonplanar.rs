use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nonplanar::cli::{self, Overrides, RunOptions, Scenario};
use nonplanar::control::ControllerKind;

#[derive(Parser)]
#[command(name = "nonplanar", version, about = "Simulate path-tracking controllers on nonplanar roads")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one controller on a scenario.
    Run {
        scenario: PathBuf,
        /// Output directory for the CSV and metrics files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Road file to use instead of the scenario's.
        #[arg(long)]
        seed_road: Option<PathBuf>,
        #[arg(long, value_name = "S")]
        duration: Option<f64>,
        #[arg(long, value_name = "M/S")]
        v_ref: Option<f64>,
        #[arg(long, value_name = "NAME")]
        controller: Option<ControllerKind>,
        #[arg(long)]
        no_planner: bool,
        /// Write `nan` for solve times so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run several controllers on the same scenario and tabulate metrics.
    Compare {
        scenario: PathBuf,
        /// Comma-separated list, e.g. nonplanar-mpc,planar-mpc,stanley.
        #[arg(long, value_delimiter = ',', required = true)]
        controllers: Vec<ControllerKind>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_name = "S")]
        duration: Option<f64>,
        #[arg(long, value_name = "M/S")]
        v_ref: Option<f64>,
        #[arg(long)]
        no_planner: bool,
        #[arg(long)]
        no_timing: bool,
    },
}

fn load(path: &PathBuf, ov: &Overrides) -> Result<Scenario, cli::RunError> {
    let mut sc = Scenario::load(path)?;
    ov.apply(&mut sc)?;
    Ok(sc)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NONPLANAR_LOG", "warn")).init();
    let args = Args::parse();
    let result = match args.command {
        Command::Run { scenario, out, seed_road, duration, v_ref, controller, no_planner, no_timing } => {
            let ov = Overrides { road: seed_road, duration, v_ref, controller, no_planner };
            run(&scenario, &ov, &out, RunOptions { timing: !no_timing })
        }
        Command::Compare { scenario, controllers, out, duration, v_ref, no_planner, no_timing } => {
            let ov = Overrides { duration, v_ref, no_planner, ..Default::default() };
            compare(&scenario, &ov, &controllers, &out, RunOptions { timing: !no_timing })
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(path: &PathBuf, ov: &Overrides, out: &PathBuf, opts: RunOptions) -> Result<ExitCode, cli::RunError> {
    let sc = load(path, ov)?;
    let outcome = cli::run(&sc)?;
    let files = cli::write_outputs(out, &sc, &outcome, opts)?;
    print!("{}", cli::metrics_table(&cli::summary_rows(std::slice::from_ref(&outcome))));
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(match &outcome.divergence {
        None => ExitCode::SUCCESS,
        Some(d) => {
            eprintln!("simulation diverged at step {} (t = {:.2} s): {}", d.step, d.t, d.reason);
            ExitCode::FAILURE
        }
    })
}

fn compare(
    path: &PathBuf,
    ov: &Overrides,
    controllers: &[ControllerKind],
    out: &PathBuf,
    opts: RunOptions,
) -> Result<ExitCode, cli::RunError> {
    let sc = load(path, ov)?;
    let outcomes = cli::compare(&sc, controllers)?;
    for o in &outcomes {
        cli::write_outputs(out, &sc, o, opts)?;
    }
    let table = cli::metrics_table(&cli::summary_rows(&outcomes));
    let report = out.join(format!("{}_compare.txt", sc.name));
    cli::write_atomic(&report, table.as_bytes())
        .map_err(|source| cli::RunError::Output { path: report.display().to_string(), source })?;
    print!("{table}");
    println!("wrote {}", report.display());
    Ok(if outcomes.iter().all(|o| o.divergence.is_none()) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
