use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use zeta_cli::{execute, exit_code, preset, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "zeta",
    version,
    about = "Critical points of J = Psi - Phi through the energy function zeta"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate zeta, zeta' and the maximizer diagnostics on the configured radii.
    Scan(RunArgs),
    /// Mountain-pass search: witnesses, critical radius, solution.
    Solve(RunArgs),
    /// First Dirichlet eigenpair of the model's quadratic form.
    Eig(RunArgs),
    /// Finite-difference and invariant checks, written as JSON lines.
    Verify(RunArgs),
    /// Print a preset as a TOML config.
    Preset { name: String },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Named preset instead of a config file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::load(path),
        (None, Some(name)) => preset(name),
        (None, None) => bail!("give --config or --preset"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (cmd, args) = match cli.command {
        Cmd::Scan(a) => (Command::Scan, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Eig(a) => (Command::Eig, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Preset { name } => {
            print!("{}", preset(&name)?.to_toml()?);
            return Ok(true);
        }
    };
    let cfg = load(&args)?;
    let out = args.out.unwrap_or_else(|| cfg.output.directory.clone());
    let outcome = execute(cmd, &cfg, &out)?;
    println!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    if !outcome.passed {
        eprintln!("some checks failed");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
