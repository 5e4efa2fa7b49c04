use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hazardlab_cli::{parse_config, run, Format, Kind, RunConfig, Status};

/// Random hazard rates from kernel mixtures of completely random measures.
#[derive(Parser)]
#[command(name = "hazardlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the regime catalog.
    Regimes {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Evaluate a theorem's conditions on a horizon grid.
    CheckConditions {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a Monte Carlo check of a Gaussian limit.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write one seeded hazard path as `t,hazard` CSV.
    SamplePaths {
        #[arg(long)]
        config: PathBuf,
        /// Number of intervals of the time grid.
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn load(path: &Path, kind: Kind) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let cfg = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if cfg.kind != kind {
        return Err(format!(
            "{}: experiment.kind is {} but the subcommand is {}",
            path.display(),
            cfg.kind.name(),
            kind.name()
        ));
    }
    Ok(cfg)
}

fn config_for(command: Command) -> Result<RunConfig, String> {
    match command {
        Command::Regimes { out, format } => {
            let mut cfg = RunConfig::defaults(Kind::Regimes);
            cfg.output.path = out;
            cfg.output.format = match format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Json => Format::Json,
            };
            Ok(cfg)
        }
        Command::CheckConditions { config } => load(&config, Kind::CheckConditions),
        Command::Simulate { config } => load(&config, Kind::Simulate),
        Command::SamplePaths { config, grid } => {
            let mut cfg = load(&config, Kind::SamplePaths)?;
            if let Some(n) = grid {
                if n == 0 {
                    return Err("--grid must be at least 1".into());
                }
                cfg.grid = n;
            }
            Ok(cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match config_for(cli.command) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(status @ Status::VerdictFailure(_)) => {
            let Status::VerdictFailure(failures) = &status else { unreachable!() };
            for f in failures {
                eprintln!("verdict failure: {f}");
            }
            ExitCode::from(status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
