//! `micromaser`: parameter scans and figure data for the micromaser linewidth.

mod commands;
mod config;
mod error;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, Overrides, Resolved};
use error::CliError;

#[derive(Parser)]
#[command(name = "micromaser", version, about = "Micromaser linewidth scans")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Linewidth by every route along a scan of the pump parameter.
    ScanTheta(RunArgs),
    /// Photon statistics and n-resolved linewidth weights.
    FockResolved(RunArgs),
    /// Field correlation g(t) and spectrum S(omega) at one parameter point.
    Spectrum(RunArgs),
    /// Uniform-approximation linewidths against the exact closed form.
    UniformConvergence(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with any of the flag fields; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

fn execute(command: Command, args: RunArgs) -> Result<(), CliError> {
    let base = match &args.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let cfg = Resolved::new(command, base.merged(args.overrides))?;
    let doc = commands::run(&cfg)?;
    let mut buf = Vec::new();
    doc.write(cfg.format, &mut buf).expect("writing to memory");
    match &args.out {
        Some(path) => std::fs::write(path, &buf).map_err(|e| CliError::Io {
            path: path.clone(),
            message: e.to_string(),
        }),
        None => std::io::stdout().write_all(&buf).map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            let err = CliError::Config(first);
            eprintln!("{}", err.to_line());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let (command, args) = match cli.command {
        Sub::ScanTheta(a) => (Command::ScanTheta, a),
        Sub::FockResolved(a) => (Command::FockResolved, a),
        Sub::Spectrum(a) => (Command::Spectrum, a),
        Sub::UniformConvergence(a) => (Command::UniformConvergence, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_line());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
