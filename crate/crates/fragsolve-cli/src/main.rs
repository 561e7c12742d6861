//! Command-line front end for the fragmentation solvers.
//!
//! Four subcommands share one scenario-file format: `solve` tabulates the
//! closed-form density on a grid, `moments` tabulates closed-form moments
//! next to quadrature of the same snapshots, `validate` cross-checks the
//! closed forms against a direct integration of the governing equation and
//! emits a JSON report, and `figure` reproduces the stock moment tables from
//! scenarios compiled into the binary.
//!
//! Exit codes: 0 success, 2 configuration problem, 3 numerical failure,
//! 4 validation failure.

mod config;
mod engine;
mod error;
mod figure;
mod output;
mod validate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_scenario, Format};
use crate::error::{config as config_err, CliError};
use crate::figure::FigureKind;
use crate::output::{resolve_destination, write_bytes, write_rows};

#[derive(Parser)]
#[command(
    name = "fragsolve",
    about = "Closed-form solutions of fragmentation with size growth or decay",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the density (and any point mass) at the configured times.
    Solve(TableArgs),
    /// Tabulate closed-form moments next to quadrature of the snapshots.
    Moments(TableArgs),
    /// Cross-check the closed forms against direct numerical integration.
    Validate(ValidateArgs),
    /// Write the stock figure moment tables.
    Figure(FigureArgs),
}

#[derive(Args)]
struct TableArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the scenario's `output.path`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json; defaults to the scenario's, else csv.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    table: TableArgs,
    /// Acceptance threshold for the L¹ and moment checks.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
}

#[derive(Args)]
struct FigureArgs {
    /// Which figure's tables to produce.
    which: FigureKind,
    /// Directory the panel files are written into.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Table format: csv or json.
    #[arg(long, default_value = "csv")]
    format: Format,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => {
            let scenario = load_scenario(&args.config)?;
            let rows = engine::solve_rows(&scenario)?;
            let (path, format) = resolve_destination(&scenario, args.out, args.format);
            write_rows(&rows, path.as_deref(), format)
        }
        Command::Moments(args) => {
            let scenario = load_scenario(&args.config)?;
            let rows = engine::moment_rows(&scenario)?;
            let (path, format) = resolve_destination(&scenario, args.out, args.format);
            write_rows(&rows, path.as_deref(), format)
        }
        Command::Validate(args) => {
            if args.table.format == Some(Format::Csv) {
                return Err(config_err(
                    "--format",
                    "the validation report is emitted as json",
                ));
            }
            let scenario = load_scenario(&args.table.config)?;
            let (report, failed) = validate::run_validation(&scenario, args.tolerance)?;
            let (path, _) = resolve_destination(&scenario, args.table.out, None);
            let mut bytes = serde_json::to_vec_pretty(&report)
                .map_err(|e| CliError::Numeric(format!("serializing report: {e}")))?;
            bytes.push(b'\n');
            write_bytes(&bytes, path.as_deref())?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(failed.join("; ")))
            }
        }
        Command::Figure(args) => {
            let written = figure::run_figure(args.which, &args.out, args.format)?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
