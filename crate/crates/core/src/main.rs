use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use skt_lab::study::{self, Report, StudyConfig};
use skt_lab::Error;

const EXIT_SOLVER: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser)]
#[command(name = "skt-lab", version, about = "Nonlocal and local SKT cross-diffusion experiments")]
struct Cli {
    /// Configuration file (flat `key = value` text).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate the nonlocal system at scale `study.n`.
    SimulateNonlocal,
    /// Integrate the local reference system.
    SimulateLocal,
    /// Solve the dual problem for the transformed test function.
    DualSolve,
    /// Measure |Δⁿψ − Δψ| across `study.n_list`.
    ConsistencyTest,
    /// Audit ‖Δⁿξ‖_p / ‖ξ‖_{W^{2,p}} across `study.n_list`.
    Lemma4Audit,
    /// Nonlocal-to-local convergence study.
    ConvergenceStudy,
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::InvalidArgument("--config <path> is required".into()))?;
    let cfg = StudyConfig::from_file(path)?;
    let out = cli.out.as_path();
    match cli.command {
        Command::SimulateNonlocal => study::simulate_nonlocal_command(&cfg, out),
        Command::SimulateLocal => study::simulate_local_command(&cfg, out),
        Command::DualSolve => study::dual_solve_command(&cfg, out),
        Command::ConsistencyTest => study::consistency_command(&cfg, out),
        Command::Lemma4Audit => study::lemma4_command(&cfg, out),
        Command::ConvergenceStudy => study::convergence_command(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match run(&cli) {
        Ok(report) => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("[{tag}] {} {}", c.name, c.detail);
            }
            println!("wrote {}", cli.out.join("report.json").display());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_INVARIANT)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_error() {
                ExitCode::from(EXIT_SOLVER)
            } else {
                ExitCode::from(EXIT_CONFIG)
            }
        }
    }
}
