use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use corrflux::dynamics::IntegrationSettings;
use corrflux::qubit_example::ExampleParams;
use corrflux_cli::commands::{self, Format, Status, SweepSpec};

#[derive(Parser)]
#[command(name = "corrflux", version, about = "Energy bookkeeping for locally dissipative bipartite quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write one record per stored time.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a scenario over a grid of one numeric parameter.
    Sweep {
        scenario: PathBuf,
        /// `c`, `g`, or a JSON pointer into the scenario.
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        min: f64,
        #[arg(long, allow_hyphen_values = true)]
        max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Report the condition residuals over random product states as JSON.
    CheckConditions {
        scenario: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Overridden by CORRFLUX_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Two thermalizing qubits with a ZZ coupling and a correlated start.
    Example {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        omega_a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        omega_b: f64,
        #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
        g: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        beta_a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        beta_b: f64,
        #[arg(long, default_value_t = 0.02, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 10)]
        record_every: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Run { scenario, format, output } => commands::run(&scenario, output.as_deref(), format),
        Command::Sweep { scenario, param, min, max, steps, output_dir } => {
            commands::sweep(&scenario, &SweepSpec { param, min, max, steps }, &output_dir)
        }
        Command::CheckConditions { scenario, samples, seed } => {
            let report = commands::check(&scenario, samples, commands::resolve_seed(seed)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(Status::Clean)
        }
        Command::Example { omega_a, omega_b, g, beta_a, beta_b, c, t_final, dt, record_every, format, output } => {
            let params = ExampleParams { omega_a, omega_b, g, beta_a, beta_b, c };
            let settings = IntegrationSettings { t_final, dt, record_every };
            commands::example(&params, settings, output.as_deref(), format)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
