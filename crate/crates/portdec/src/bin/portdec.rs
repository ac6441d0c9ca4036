//! Command-line front end: build and inspect meshes, verify Dirac
//! structures, run scenarios, and run convergence studies.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use portdec::cli::{self, CliError, Scenario};

#[derive(Parser)]
#[command(name = "portdec", version, about = "Discrete exterior calculus and port-Hamiltonian simulation on simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Dirac structure utilities.
    Dirac {
        #[command(subcommand)]
        command: DiracCommand,
    },
    /// Integrate a scenario and write trajectory CSVs.
    Simulate(SimulateArgs),
    /// Mesh-refinement convergence study of a scenario with an exact
    /// reference.
    Converge(ConvergeArgs),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Validate a mesh file and print counts, boundary summary, and the
    /// well-centeredness verdict.
    Check {
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(Subcommand)]
enum DiracCommand {
    /// Verify isotropy and the summation-by-parts identity for the
    /// scenario's structure.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        /// Deliberately corrupt one sign in the structure; verification must
        /// then fail (exit 1).
        #[arg(long)]
        fault_inject: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for trajectory.csv, summary.txt, and (with an exact
    /// reference) voltage_field.csv / error_field.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the scenario time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the scenario final time.
    #[arg(long)]
    tfinal: Option<f64>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated mesh sizes, e.g. 10,20,40,80.
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    dt: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Mesh {
            command: MeshCommand::Check { mesh },
        } => {
            let report = cli::run_mesh_check(&mesh)?;
            print!("{report}");
            Ok(if report.well_centered {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Dirac {
            command:
                DiracCommand::Verify {
                    scenario,
                    fault_inject,
                },
        } => {
            let scenario = Scenario::load(&scenario)?;
            let report = cli::run_dirac_verify(&scenario, fault_inject)?;
            println!("{report}");
            Ok(if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Simulate(args) => {
            let scenario = Scenario::load(&args.scenario)?;
            let summary = cli::run_simulate(&scenario, &args.out, args.dt, args.tfinal)?;
            print!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Converge(args) => {
            let scenario = Scenario::load(&args.scenario)?;
            let study = cli::run_converge(&scenario, &args.n_list, &args.out, args.dt)?;
            println!("n,h,max_error");
            for row in &study.rows {
                println!("{},{:.6e},{:.6e}", row.n, row.h, row.max_error);
            }
            println!("fitted order: {:.4}", study.slope);
            Ok(ExitCode::SUCCESS)
        }
    }
}
