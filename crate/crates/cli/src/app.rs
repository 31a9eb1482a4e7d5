//! Command-line parsing and dispatch.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{sha256_hex, write_manifest, write_tables, OutputRecord, RunManifest};
use crate::quantity::Grid;
use crate::run::{fidelity_table, run, RunContext};
use crate::scenario::{load_scenario, FidelityParams, Kind, Scenario};
use crate::verify::verify;

#[derive(Debug, Parser)]
#[command(name = "rydswap", version, about = "Phonon-swap cooling scenarios: tables, sweeps and regression checks")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "RYDSWAP_OUT", default_value = "rydswap-out")]
    pub out: PathBuf,

    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Seed for the Monte-Carlo oracle.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Taylor expansion of the pair potential, phonon couplings and anharmonicities.
    Expand(ScenarioArgs),
    /// Gaussian chain swap efficiency sweeps.
    SwapChain(ScenarioArgs),
    /// Maximum separation for a given tolerated phonon loss.
    Range(ScenarioArgs),
    /// Molecular hyperfine spectra, stretched-state purity and dressing deviation.
    Hyperfine(ScenarioArgs),
    /// Qubit fidelity after a swap with a state-dependent interaction.
    Fidelity(FidelityArgs),
    /// Channel C6 values, angular factors and mixing fractions.
    Interactions(ScenarioArgs),
    /// Runs the bundled regression scenarios and checks them.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario file(s); several run in parallel.
    #[arg(long, required = true, num_args = 1..)]
    pub scenario: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[arg(long, num_args = 1.., conflicts_with_all = ["a2", "n", "epsilon"])]
    pub scenario: Vec<PathBuf>,

    /// |a|^2 grid: list `0.1,0.5` or range `start:stop:count`.
    #[arg(long, requires_all = ["n", "epsilon"])]
    pub a2: Option<String>,

    /// Phonon number grid.
    #[arg(long)]
    pub n: Option<String>,

    /// Interaction deviation grid.
    #[arg(long)]
    pub epsilon: Option<String>,

    /// Output file name for a flag-driven run.
    #[arg(long, default_value = "fidelity.csv")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Only print failing checks.
    #[arg(long)]
    pub quiet: bool,
}

/// Runs one scenario and writes its tables and manifest under `dir`.
pub fn execute(scenario: &Scenario, source_text: &str, dir: &Path, ctx: &RunContext) -> Result<Vec<OutputRecord>, CliError> {
    let start = Instant::now();
    let tables = run(scenario, ctx)?;
    let outputs = write_tables(dir, &tables)?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: scenario.name.clone(),
        kind: scenario.kind().name(),
        scenario_sha256: sha256_hex(source_text.as_bytes()),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: outputs.clone(),
    };
    write_manifest(dir, &manifest)?;
    Ok(outputs)
}

fn run_files(paths: &[PathBuf], expected: Kind, dir: &Path, ctx: &RunContext) -> Result<(), CliError> {
    let results: Vec<Result<Vec<OutputRecord>, CliError>> = paths
        .par_iter()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let scenario = load_scenario(path)?;
            if scenario.kind() != expected {
                return Err(CliError::Schema(format!(
                    "{}: scenario kind `{}` does not match subcommand `{}`",
                    path.display(),
                    scenario.kind().name(),
                    expected.name()
                )));
            }
            execute(&scenario, &text, dir, ctx)
        })
        .collect();
    for r in results {
        for rec in r? {
            println!("{}", dir.join(&rec.path).display());
        }
    }
    Ok(())
}

fn grid(flag: &str, text: &Option<String>) -> Result<Grid, CliError> {
    let text = text.as_deref().ok_or_else(|| CliError::Schema(format!("missing --{flag}")))?;
    Grid::parse(text).map_err(|e| CliError::Schema(format!("--{flag}: {e}")))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let ctx = RunContext { seed: cli.seed };
    let dir = cli.out.as_path();
    match &cli.command {
        Command::Expand(a) => run_files(&a.scenario, Kind::Expand, dir, &ctx),
        Command::SwapChain(a) => run_files(&a.scenario, Kind::SwapChain, dir, &ctx),
        Command::Range(a) => run_files(&a.scenario, Kind::Range, dir, &ctx),
        Command::Hyperfine(a) => run_files(&a.scenario, Kind::Hyperfine, dir, &ctx),
        Command::Interactions(a) => run_files(&a.scenario, Kind::Interactions, dir, &ctx),
        Command::Fidelity(a) if !a.scenario.is_empty() => run_files(&a.scenario, Kind::Fidelity, dir, &ctx),
        Command::Fidelity(a) => {
            let p = FidelityParams { a2: grid("a2", &a.a2)?, n: grid("n", &a.n)?, epsilon: grid("epsilon", &a.epsilon)? };
            let out = &a.output;
            if Path::new(out).is_absolute() || out.contains("..") {
                return Err(CliError::Schema(format!("--output `{out}` must be relative")));
            }
            let recs = write_tables(dir, &[(out.clone(), fidelity_table(&p)?)])?;
            for rec in recs {
                println!("{}", dir.join(&rec.path).display());
            }
            Ok(())
        }
        Command::Verify(a) => {
            let report = verify(dir, &ctx)?;
            for c in &report.checks {
                if !a.quiet || !c.pass() {
                    println!("{}", c.line());
                }
            }
            let failed = report.checks.iter().filter(|c| !c.pass()).count();
            println!("{} checks, {failed} failed; outputs in {}", report.checks.len(), dir.display());
            if failed > 0 {
                return Err(CliError::Verification(format!("{failed} regression checks failed")));
            }
            Ok(())
        }
    }
}

/// Entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(CliError::Io(format!("thread pool: {e}"))),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            e.exit_code()
        }
    }
}
