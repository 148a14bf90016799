use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scl_cli::{configure_threads, execute, CliError, Command, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "scl", version, about = "Singular measures of critical circle maps: experiments")]
struct Args {
    /// JSON experiment configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Deepest partition level.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Sample count for both measures.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Tune the map to the target rotation number.
    Tune,
    /// Singularity exponents, Hausdorff proxy and singularity profile.
    Exponents,
    /// Discrepancy between conjugate partitions.
    Discrepancy,
    /// Cross-ratio identity and expansion sweeps.
    CrossratioCheck,
}

fn run(args: Args) -> Result<(), CliError> {
    configure_threads()?;
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    config.apply(&Overrides { seed: args.seed, depth: args.depth, samples: args.samples, out: args.out.clone() });
    let command = match args.command {
        Cmd::Tune => Command::Tune,
        Cmd::Exponents => Command::Exponents,
        Cmd::Discrepancy => Command::Discrepancy,
        Cmd::CrossratioCheck => Command::CrossratioCheck,
    };
    let report = execute(command, &config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let written = report.write(&config.out)?;
    println!("{}: wrote {} files to {}", command.name(), written.len(), config.out.display());
    if !report.failures.is_empty() {
        return Err(CliError::Check(report.failures.join("; ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
