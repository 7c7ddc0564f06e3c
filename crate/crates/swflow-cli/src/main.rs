use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use swflow_cli::{Command, Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "swflow", version, about = "Spectral flow and orientation experiments")]
struct Args {
    command: Command,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Fourier cutoff N.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Comma-separated flux values, or a range `a..b`.
    #[arg(long, allow_hyphen_values = true)]
    flux: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record wall-clock seconds in the summary.
    #[arg(long)]
    timing: bool,
}

fn resolve(args: Args) -> Result<RunConfig, swflow_cli::ConfigError> {
    let file = args.config.as_deref().map(Overrides::from_file).transpose()?;
    let flux = match &args.flux {
        Some(s) => Some(swflow_cli::config::parse_list(s).ok_or_else(|| swflow_cli::ConfigError::Value {
            key: "flux".into(),
            value: s.clone(),
        })?),
        None => None,
    };
    let flags = Overrides {
        seed: args.seed,
        trials: args.trials,
        dim: args.dim,
        cutoff: args.cutoff,
        flux,
        out: args.out,
        format: args.format,
        timing: args.timing.then_some(true),
        ..Default::default()
    };
    RunConfig::resolve(args.command, file, flags)
}

fn main() -> ExitCode {
    let cfg = match resolve(Args::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("swflow: {e}");
            return ExitCode::from(2);
        }
    };
    let report = swflow_cli::run(&cfg);
    let text = swflow_cli::render(&report, cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("swflow: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    for r in report.results.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} ({})", r.id, r.citation);
    }
    ExitCode::from(report.exit_code() as u8)
}
