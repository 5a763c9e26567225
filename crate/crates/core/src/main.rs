use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use uqdp::experiments::{self, ExperimentConfig};

#[derive(Parser)]
#[command(name = "uqdp", version = env!("UQDP_BUILD_ID"), about = "Encoded-qubit dephasing and gate-fidelity sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config with sections circuit, noise, gates, run
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides run.seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides run.out
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Trajectories per grid point; overrides run.n_traj
    #[arg(long, global = true)]
    traj: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// T2 of bare and encoded qubits over the eta grid
    Dephasing,
    /// F_x of the single-qubit gate over eta and E_m
    FxGrid,
    /// F_C of the two-qubit gate over eta for each E_cc
    FcCurves,
    /// Calibration and consistency checks; nonzero exit on failure
    Validate,
    /// Dump sampled noise components and the spectral check
    NoiseAudit,
}

fn load(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.run.seed = Some(s);
    }
    if let Some(n) = cli.traj {
        cfg.run.n_traj = n;
    }
    if let Some(o) = &cli.out {
        cfg.run.out = Some(o.display().to_string());
    }
    cfg.validate()?;
    cfg.seed()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = load(cli)?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let out = PathBuf::from(cfg.run.out.clone().unwrap_or_else(|| "results".into()));
    let path = match cli.command {
        Command::Dephasing => experiments::run_dephasing_sweep(&cfg, &out)?,
        Command::FxGrid => experiments::run_fx_grid(&cfg, &out)?,
        Command::FcCurves => experiments::run_fc_curves(&cfg, &out)?,
        Command::NoiseAudit => experiments::run_noise_audit(&cfg, &out)?,
        Command::Validate => {
            let report = experiments::run_validation(&cfg, &out)?;
            for c in &report.checks {
                println!("{}", c.line());
            }
            println!("wrote {}", report.path.display());
            return Ok(report.passed());
        }
    };
    println!("wrote {}", path.display());
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
