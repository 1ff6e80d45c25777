//! Front end for the `tdho` library: configuration, subcommands and artifacts.
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{CommandError, Run};
use config::SimulationConfig;

#[derive(Debug, Parser)]
#[command(name = "tdho", version, about = "Propagators for harmonic oscillators with time-dependent frequency")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(short, long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Use a bundled profile, replacing the one in the configuration.
    #[arg(long, value_name = "NAME")]
    pub profile: Option<String>,
    /// Directory for CSV and JSON artifacts.
    #[arg(short, long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the amplitude equation and write amplitude.csv.
    SolveAmplitude(#[command(flatten)] Common),
    /// Tabulate the structure functions and write structure.csv.
    Structure(#[command(flatten)] Common),
    /// Sample the propagator and write kernel.csv.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Evaluation time; may be repeated.
        #[arg(short, long = "time", value_name = "T")]
        times: Vec<f64>,
    },
    /// Propagate the initial Gaussian to each checkpoint.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Compare against the Crank–Nicolson reference.
        #[arg(long)]
        oracle: bool,
    },
    /// Run residual and oracle checks.
    Verify {
        #[command(flatten)]
        common: Common,
        /// A single check to run.
        #[arg(value_name = "CHECK", conflicts_with = "all")]
        check: Option<String>,
        /// Run every check (the default without CHECK).
        #[arg(long)]
        all: bool,
    },
    /// List the bundled frequency profiles.
    Profiles,
}

fn load(common: &Common) -> Result<Run, CommandError> {
    let (mut config, base) = match &common.config {
        Some(path) => (config::load_config(path)?, commands::config_dir(path)),
        None => match &common.profile {
            Some(name) => (SimulationConfig::for_bundled(name)?, PathBuf::from(".")),
            None => {
                return Err(config::ConfigError::Invalid {
                    field: "config".into(),
                    message: "give --config FILE or --profile NAME".into(),
                }
                .into())
            }
        },
    };
    if let (Some(name), Some(_)) = (&common.profile, &common.config) {
        config.profile = config::ProfileSpec::Bundled { name: name.clone() };
        config.validate()?;
    }
    Ok(Run::new(config, base, common.output_dir.clone()))
}

/// Runs one command, printing its summary to stdout. Returns the process exit code.
pub fn execute(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Profiles => {
            println!("{}", commands::profiles_listing());
            return 0;
        }
        Command::SolveAmplitude(common) => load(&common).and_then(|r| commands::solve_amplitude_cmd(&r)),
        Command::Structure(common) => load(&common).and_then(|r| commands::structure_cmd(&r)),
        Command::Kernel { common, times } => load(&common).and_then(|r| commands::kernel_cmd(&r, &times)),
        Command::Evolve { common, oracle } => load(&common).and_then(|r| commands::evolve_cmd(&r, oracle)),
        Command::Verify { common, check, .. } => {
            load(&common).and_then(|r| commands::verify_cmd(&r, check.as_deref())).and_then(|results| {
                let color = commands::use_color();
                for r in &results {
                    println!("{}", commands::format_check(r, color));
                }
                let failed = results.iter().filter(|r| r.status == commands::Status::Fail).count();
                if failed == 0 {
                    Ok(format!("all {} checks passed or were skipped", results.len()))
                } else {
                    Err(CommandError::VerifyFailed { failed, total: results.len() })
                }
            })
        }
    };
    match result {
        Ok(message) => {
            println!("{message}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(t) = e.failure_time() {
                eprintln!("failure time: t = {t}");
            }
            e.exit_code()
        }
    }
}
