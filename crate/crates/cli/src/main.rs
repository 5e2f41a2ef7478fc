use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fbist::harness::{replay, run, ExperimentConfig, HarnessError, Mode, OUT_DIR_ENV};

/// Evolutionary functional-BIST test generation and fault grading.
#[derive(Parser)]
#[command(name = "fbist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a single pattern and a greedy test set of operand pairs
    Ga(RunArgs),
    /// Evolve a microprogram by linear genetic programming
    Gp(RunArgs),
    /// Grade a test set against a gate-level ALU netlist
    Faultsim(RunArgs),
    /// Test-set coverage and length across operand widths
    Sweep(RunArgs),
    /// Re-run a recorded experiment and verify its outputs
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the configuration
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the configuration and FBIST_OUT_DIR
    #[arg(long)]
    out: Option<PathBuf>,
}

fn experiment(mode: Mode, args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut config = ExperimentConfig::load(&args.config, mode)?;
    if config.mode != mode {
        return Err(HarnessError::Config(format!(
            "configuration sets mode `{}` but the `{}` command was given",
            config.mode.name(),
            mode.name()
        )));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    } else if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
        config.out_dir = PathBuf::from(dir);
    }
    Ok(config)
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    let (mode, args) = match command {
        Command::Replay { manifest } => {
            let files = replay(&manifest)?;
            println!("replay ok: {} outputs identical ({})", files.len(), files.join(", "));
            return Ok(());
        }
        Command::Ga(a) => (Mode::Ga, a),
        Command::Gp(a) => (Mode::Gp, a),
        Command::Faultsim(a) => (Mode::Faultsim, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    let report = run(&experiment(mode, &args)?)?;
    for line in &report.summary {
        println!("{line}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fbist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
