//! `twoboson`: classify coupling triples, list discrete spectra, sweep
//! parameter planes, emit region boundaries and run the acceptance suite.

mod commands;
mod config;
mod phase;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_pair, Format, RunConfig};
use twoboson::Error;

#[derive(Parser, Debug)]
#[command(name = "twoboson", version, about = "Discrete spectrum of two-boson lattice fiber Hamiltonians")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// On-site coupling γ.
    #[arg(short = 'g', long = "gamma", global = true, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Nearest-neighbour coupling λ.
    #[arg(short = 'l', long = "lambda", global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Next-nearest-neighbour coupling μ.
    #[arg(short = 'u', long = "mu", global = true, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Quasimomentum as `kx,ky`.
    #[arg(long = "K", global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    k: Option<(f64, f64)>,
    /// Oracle grid size L (even, at least 8).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Relative tolerance of the torus quadrature.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true, env = "TWOBOSON_THREADS")]
    threads: Option<usize>,
    /// Seed for every sampled quantity.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sector indices and predicted counts (m, n) at K = 0.
    Classify {
        /// Use labels from self-calibration instead of the printed indices.
        #[arg(long)]
        calibrate: bool,
    },
    /// Discrete eigenvalues: determinant path plus oracle at K = 0, oracle otherwise.
    Spectrum,
    /// Counts over a grid in a plane of two couplings; the third comes from -g/-l/-u.
    Sweep(commands::SweepArgs),
    /// Sampled region boundaries with NaN rows between branches.
    PhaseDiagram(phase::PhaseArgs),
    /// Runs the acceptance checks; exit code 1 if any fails.
    Verify {
        /// Comma-separated check numbers; all twelve by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

/// Usage and configuration failures exit with 2, numerical ones with 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::NonFiniteCoupling(_)
        | Error::GridSize(_)
        | Error::Pole { .. }
        | Error::InsideBand { .. }
        | Error::BasisIndex(_)
        | Error::KernelIndex { .. }
        | Error::DimensionCap { .. } => 2,
        _ => 1,
    }
}

fn build_config(common: &Common) -> twoboson::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.load_file(path)?;
    }
    cfg.gamma = common.gamma.or(cfg.gamma);
    cfg.lambda = common.lambda.or(cfg.lambda);
    cfg.mu = common.mu.or(cfg.mu);
    cfg.k = common.k.or(cfg.k);
    if let Some(l) = common.grid {
        cfg.grid = l;
    }
    if let Some(t) = common.tol {
        cfg.scan.quadrature.rel_tol = t;
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    cfg.threads = common.threads.or(cfg.threads);
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> twoboson::Result<bool> {
    let cfg = build_config(&cli.common)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Classify { calibrate } => commands::classify(&cfg, calibrate, &mut out).map(|_| true),
        Command::Spectrum => commands::spectrum(&cfg, &mut out).map(|_| true),
        Command::Sweep(args) => commands::sweep(&cfg, &args, &mut out).map(|_| true),
        Command::PhaseDiagram(args) => phase::phase_diagram(&cfg, &args, &mut out).map(|_| true),
        Command::Verify { only } => commands::verify(&cfg, &only, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
