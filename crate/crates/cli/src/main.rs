use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use libration::Execution;
use libration_cli::commands::{self, ensure_out_dir, Options};
use libration_cli::config;
use libration_cli::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

/// Librational-mode nonlinearity, bistability and squeezing of a levitated spheroid.
#[derive(Debug, Parser)]
#[command(name = "libration", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Seed for Monte Carlo cross-checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Evaluate grids on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mode constants and optional size/eccentricity sweeps.
    Derive {
        /// Monte Carlo samples for an independent inertia estimate (0 skips it).
        #[arg(long, default_value_t = 0)]
        mc_samples: usize,
    },
    /// Steady-state diagram over a drive-amplitude grid.
    Bistability,
    /// Up and down drive sweeps of the mean-field dynamics.
    Hysteresis,
    /// Angle and angular-momentum variance traces.
    Squeeze,
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let cfg = config::load(&path)?;
    ensure_out_dir(&cli.out)?;
    let mut opts = Options {
        out: cli.out,
        svg: cli.format == Format::CsvSvg,
        seed: cli.seed,
        mc_samples: 0,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let report = match cli.command {
        Command::Derive { mc_samples } => {
            opts.mc_samples = mc_samples;
            commands::derive(&cfg, &opts)?
        }
        Command::Bistability => commands::bistability(&cfg, &opts)?,
        Command::Hysteresis => commands::hysteresis(&cfg, &opts)?,
        Command::Squeeze => commands::squeeze(&cfg, &opts)?,
    };
    let mut lines = report.lines;
    lines.extend(report.files.iter().map(|f| format!("wrote {}", f.display())));
    Ok(lines)
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
