//! `dmera`: circuit construction, cone analysis, compilation benchmarks,
//! template Monte Carlo sweeps, resource estimates and oracle checks.

mod commands;
mod output;
mod ranges;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BuildArgs, CompileArgs, EstimateArgs, FermiArgs, PccArgs, PlateauArgs, VerifyArgs};

/// Input problems the user can fix: bad flags, invalid parameters.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

#[derive(Parser)]
#[command(name = "dmera", version, about = "Deep MERA circuits: cones, compilation, Monte Carlo and resource estimates")]
struct Cli {
    /// Worker threads for sweeps (default: DMERA_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the circuit as JSON.
    Build(BuildArgs),
    /// Cone gate counts and widths over an (n, D) grid.
    Pcc(PccArgs),
    /// Qubit counts of the layer-sweep and cone-peeling compilers.
    Compile(CompileArgs),
    /// Random-Clifford template sweep.
    Plateau(PlateauArgs),
    /// Incoherent and coherent cost reports.
    Estimate(EstimateArgs),
    /// Fermionic cone compilation with a statevector cross-check.
    Fermi(FermiArgs),
    /// Desk-scale oracle suite.
    Verify(VerifyArgs),
}

fn threads(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("DMERA_THREADS") {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("DMERA_THREADS must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = threads(cli.threads)? {
        if n == 0 {
            return Err(usage("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Build(a) => commands::build(a),
        Command::Pcc(a) => commands::pcc(a),
        Command::Compile(a) => commands::compile(a),
        Command::Plateau(a) => commands::plateau(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Fermi(a) => commands::fermi(a),
        Command::Verify(a) => verify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.downcast_ref::<Usage>().is_some()
                || e.downcast_ref::<dmera_core::DmeraError>().is_some();
            ExitCode::from(if validation { 2 } else { 1 })
        }
    }
}
