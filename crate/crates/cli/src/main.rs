//! `subrad`: experiment runner for the radial-comparison laboratory. Every
//! subcommand writes `<name>.csv` and `<name>.summary.txt` and exits 0 when
//! all verdicts pass, 1 when a verdict fails, 2 on configuration or solver
//! errors.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Params;
use experiments::Ctx;

#[derive(Parser, Debug)]
#[command(name = "subrad", version, about = "radial-process comparison experiments")]
struct Cli {
    /// worker threads (default: SUBRAD_WORKERS, then all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// directory for CSV and summary artifacts
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    /// key=value config file; command-line flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// tabulate the comparison drifts and check their identities
    DriftTable(experiments::DriftTableArgs),
    /// group radius vs comparison diffusion stochastic dominance
    DominanceTest(experiments::DominanceArgs),
    /// mean exit times against the d = 5 closed form
    ExitTimes(experiments::ExitTimesArgs),
    /// Sturm-Liouville eigenvalue of the 1D comparison generator
    #[command(name = "eigen-1d")]
    Eigen1d(experiments::Eigen1dArgs),
    /// 3D sub-Laplacian eigenvalue on the CC ball
    #[command(name = "eigen-3d")]
    Eigen3d(experiments::Eigen3dArgs),
    /// exit-time tail fit of the group eigenvalue
    McLambda1(experiments::McLambda1Args),
    /// Dirichlet heat-content comparison on an (s, t) grid
    HeatCompare(experiments::HeatCompareArgs),
    /// CC volume exponent 4 and heat-content exponent 5
    VolumeScaling(experiments::VolumeScalingArgs),
    /// quadratic variation of the radial readout against 2t
    QvCheck(experiments::QvCheckArgs),
    /// iterated-logarithm exceedance against the comparison diffusion
    LilCheck(experiments::LilCheckArgs),
    /// Lyapunov feasibility certificates and the G'' identity
    CompletenessCheck(experiments::CompletenessArgs),
    /// Gaussian barrier simulation with envelope check
    BarrierProbe(experiments::BarrierProbeArgs),
}

fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, String> {
    if let Some(w) = flag {
        return Ok(Some(w));
    }
    match std::env::var("SUBRAD_WORKERS") {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| format!("SUBRAD_WORKERS must be an integer, got {v}")),
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    if let Some(workers) = resolve_workers(cli.workers)? {
        if workers == 0 {
            return Err("worker count must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| format!("cannot configure the worker pool: {e}"))?;
    }
    std::fs::create_dir_all(&cli.output_dir)
        .map_err(|e| format!("cannot create {}: {e}", cli.output_dir.display()))?;
    let ctx = Ctx {
        params: Params::load(cli.config.as_deref())?,
        dir: cli.output_dir.clone(),
        seed_flag: cli.seed,
    };
    experiments::run(&cli.command, &ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
