use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use otoc_cli::run::{execute, Command};
use otoc_cli::verify::{run_suite, SuiteParams};
use otoc_cli::{CliError, IDENTITY_TOL};

#[derive(Parser)]
#[command(name = "otoc", version, about = "Ancilla-free OTOC protocol runs and Rydberg dressing scans")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Suppress progress and summary messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the [sampling] section.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Direct correlator and both protocol reconstructions.
    Exact(RunArgs),
    /// Finite-shot estimates of Re C with error bands.
    Sample(RunArgs),
    /// Rotation-protocol Im C, sampled when [sampling] is present.
    Im(RunArgs),
    /// Dressed Ising coupling with and without the microwave.
    Dressing(RunArgs),
    /// Randomized identity suite; prints the largest residuals.
    Verify {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, args) = match cli.command {
        Cmd::Exact(args) => (Command::Exact, args),
        Cmd::Sample(args) => (Command::Sample, args),
        Cmd::Im(args) => (Command::Im, args),
        Cmd::Dressing(args) => (Command::Dressing, args),
        Cmd::Verify { instances, seed, out } => {
            let mut params = SuiteParams { n_instances: instances, ..Default::default() };
            if let Some(seed) = seed {
                params.seed = seed;
            }
            let report = run_suite(&params)?;
            let text = format!(
                "instances: {}\nmax_re_residual: {:.3e}\nmax_im_residual: {:.3e}\nmax_commutator_residual: {:.3e}\n",
                report.n_instances, report.re, report.im, report.commutator
            );
            emit(&text, out.as_ref())?;
            if report.max() > IDENTITY_TOL || report.max().is_nan() {
                return Err(CliError::Invariant(format!("largest residual {:.3e}", report.max())));
            }
            return Ok(());
        }
    };
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let output = execute(command, &text, args.seed)?;
    emit(&output.csv, args.out.as_ref())?;
    if !cli.quiet {
        if let Some(path) = &args.out {
            eprintln!("wrote {}", path.display());
        }
    }
    if let Some(first) = output.violations.first() {
        return Err(CliError::Invariant(format!("{first} ({} rows)", output.violations.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("otoc: {err}");
            err.exit_code()
        }
    }
}
