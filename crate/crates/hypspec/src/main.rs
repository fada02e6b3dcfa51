use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypspec::cache_file::read_cache;
use hypspec::config::GroupSpec;
use hypspec::error::EXIT_INPUT;
use hypspec::run::{self, Context, Outcome};
use hypspec::{CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "hypspec",
    version,
    about = "Spectral-measure kernels on Schottky quotients of H³"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration (defaults to the l = 1 cylinder).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Orbit cache: read by analysis commands, written by `enumerate`.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "hypspec-out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the element budget.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Override the sampling seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Enumerate the orbit to the configured radius and write a cache.
    Enumerate,
    /// Estimate the critical exponent.
    Delta,
    /// Tabulate Poincaré and displacement series.
    Poincare,
    /// Evaluate automorphic kernel sums on sampled pairs.
    Kernel,
    /// Run the bound-checking suite.
    Verify,
    /// Euclidean-cylinder negative control.
    Counterexample,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => match (&cli.cache, cli.command) {
            (Some(p), c) if !matches!(c, Command::Enumerate) => read_cache(p)?
                .config
                .unwrap_or_else(|| RunConfig::new(GroupSpec::cylinder(1.0))),
            _ => RunConfig::new(GroupSpec::cylinder(1.0)),
        },
    };
    if let Some(b) = cli.budget {
        cfg.budget = b;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let ctx = Context {
        config: load_config(cli)?,
        cache: cli.cache.clone(),
        out: cli.out.clone(),
    };
    match cli.command {
        Command::Enumerate => run::enumerate(&ctx),
        Command::Delta => run::delta(&ctx),
        Command::Poincare => run::poincare(&ctx),
        Command::Kernel => run::kernel(&ctx),
        Command::Verify => run::verify(&ctx),
        Command::Counterexample => run::counterexample(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            ExitCode::from(if code == 0 { EXIT_INPUT } else { code } as u8)
        }
    }
}
