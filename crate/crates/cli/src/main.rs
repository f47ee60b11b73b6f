use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Runs one scenario of the disperse laboratory.
#[derive(Parser)]
#[command(name = "disperse", version)]
struct Args {
    /// tau-study, gaussian-oracle, rescaled-run, fokker-planck or isentropic-contrast
    scenario: String,
    /// TOML configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: `output` from the config, else out/<scenario>)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    ExitCode::from(disperse_cli::execute(
        &args.scenario,
        &args.config,
        args.out.as_deref(),
    ))
}
