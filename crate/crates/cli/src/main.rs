//! Command-line driver: mesh generation, simulation runs, convergence
//! sweeps and point probes of finished runs.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polyvisco_core::error::{BasisError, SolverError};

#[derive(Debug, Parser)]
#[command(name = "polyvisco", version, about = "Polytopal DG solver for Kelvin-Voigt thermo/poro-viscoelasticity")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Directory that relative output paths resolve against.
    #[arg(long, global = true, env = "POLYVISCO_OUTPUT", default_value = ".")]
    pub output_root: PathBuf,
    /// Seed for Voronoi generators; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a polygonal mesh and write it to a file.
    Mesh(commands::MeshArgs),
    /// Run a simulation described by a TOML configuration.
    Run(commands::RunArgs),
    /// Manufactured-solution convergence sweep.
    Sweep(commands::SweepArgs),
    /// Extract point time series from the saved states of a finished run.
    Probe(commands::ProbeArgs),
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads(cli.global.threads).and_then(|()| match &cli.command {
        Command::Mesh(a) => commands::mesh(&cli.global, a),
        Command::Run(a) => commands::run(&cli.global, a),
        Command::Sweep(a) => commands::sweep(&cli.global, a),
        Command::Probe(a) => commands::probe(&cli.global, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(config::ConfigError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

/// Numerical breakdowns map to 3, everything else to 2.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<polyvisco_core::Error>() {
            return if err.is_config() { EXIT_CONFIG } else { EXIT_NUMERICAL };
        }
        if cause.downcast_ref::<SolverError>().is_some()
            || matches!(cause.downcast_ref::<BasisError>(), Some(BasisError::SingularGram { .. }))
            || cause.downcast_ref::<commands::NumericalFailure>().is_some()
        {
            return EXIT_NUMERICAL;
        }
    }
    EXIT_CONFIG
}
