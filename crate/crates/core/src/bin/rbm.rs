use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rbm::experiments::{run_and_write, Experiment, RunManifest, Scenario};
use rbm::{Error, Result};

/// Random batch simulations of interacting particle systems.
#[derive(Debug, Parser)]
#[command(name = "rbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: RunOpts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// 1D Langevin system: equilibrium histograms, weak and strong errors
    Langevin1d,
    /// Lennard-Jones pressure against density
    LjEos,
    /// Wall time per step against system size
    Scaling,
    /// Exhaustive and Monte Carlo checks of the batch estimator
    EstimatorChecks,
}

#[derive(Debug, Args)]
struct RunOpts {
    /// Scenario file (TOML) overlaid on the defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, env = "RBM_OUT", value_name = "DIR")]
    out: Option<PathBuf>,
    /// Long runs: large sample counts and fine reference steps
    #[arg(long, global = true)]
    paper_scale: bool,
    /// Full interactions instead of random batches
    #[arg(long, global = true)]
    no_rbm: bool,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "RBM_THREADS", value_name = "N")]
    threads: Option<usize>,
}

fn scenario(experiment: Experiment, opts: &RunOpts) -> Result<Scenario> {
    let mut base = Scenario::default_for(experiment);
    if opts.paper_scale {
        base.paper_scale();
    }
    let mut sc = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
            base.overlay(&text)?
        }
        None => base,
    };
    if let Some(seed) = opts.seed {
        sc.run.seed = seed;
    }
    if let Some(out) = &opts.out {
        sc.output.dir = out.clone();
    }
    if opts.no_rbm {
        sc.rbm.enabled = false;
    }
    sc.validate()?;
    Ok(sc)
}

fn run(cli: &Cli) -> Result<RunManifest> {
    let experiment = match cli.command {
        Command::Langevin1d => Experiment::Langevin1d,
        Command::LjEos => Experiment::LjEos,
        Command::Scaling => Experiment::Scaling,
        Command::EstimatorChecks => Experiment::EstimatorChecks,
    };
    let sc = scenario(experiment, &cli.opts)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.opts.threads {
        if n == 0 {
            return Err(Error::config("--threads", "must be positive"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::config("--threads", e.to_string()))?;
    pool.install(|| run_and_write(&sc))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(manifest) => {
            for path in &manifest.outputs {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
