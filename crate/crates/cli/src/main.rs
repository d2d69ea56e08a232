//! Command-line driver: each subcommand reads a config document, applies flag
//! overrides, writes CSV/JSON bodies plus a run manifest into `--out`.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{load, parse_list, parse_matrix, parse_periods, FieldFlags};
use output::{Outputs, RunManifest};

#[derive(Parser)]
#[command(name = "anosov-trace", version, about = "Flat traces of random twisted transfer operators on the torus")]
struct Cli {
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "ANOSOV_TRACE_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Output directory.
    #[arg(long, short, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML or JSON config document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix rows separated by `;`, e.g. `2,1;1,1`.
    #[arg(long, value_parser = parse_matrix)]
    matrix: Option<std::vec::Vec<Vec<i64>>>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the period-n orbits.
    Orbits {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Sample a roof (or one band) and evaluate it on Per(n).
    Field {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        band: Option<u32>,
        #[command(flatten)]
        field: FieldFlags,
    },
    /// One flat trace.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        #[command(flatten)]
        field: FieldFlags,
    },
    /// Monte Carlo experiment on the law of the rescaled trace.
    Clt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Also estimate the band-n orbit covariance.
        #[arg(long)]
        covariance: bool,
        #[arg(long)]
        covariance_draws: Option<usize>,
        #[command(flatten)]
        field: FieldFlags,
    },
    /// Free energy F_n(β) and the amplitude decay v_n.
    Pressure {
        #[command(flatten)]
        common: Common,
        /// Comma-separated β values.
        #[arg(long, value_parser = parse_list)]
        betas: Option<std::vec::Vec<f64>>,
        /// `a..b` or a comma-separated list.
        #[arg(long, value_parser = parse_periods)]
        periods: Option<std::vec::Vec<u32>>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Frequency required by the time/frequency regime.
    Regime {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, value_parser = parse_periods)]
        periods: Option<std::vec::Vec<u32>>,
        #[arg(long)]
        xi: Option<f64>,
    },
}

/// A failure with its exit code: 2 for configuration, 3 for computation.
#[derive(Debug)]
pub struct CliError {
    pub exit: u8,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn config(kind: &str, message: String) -> Self {
        Self { exit: 2, kind: kind.into(), message }
    }

    /// A core error raised while validating the configuration.
    pub fn invalid(e: anosov_trace::Error) -> Self {
        Self { exit: 2, kind: e.kind().into(), message: e.to_string() }
    }

    /// A core error raised by a computation.
    pub fn core(e: anosov_trace::Error) -> Self {
        Self { exit: if e.is_config_error() { 2 } else { 3 }, kind: e.kind().into(), message: e.to_string() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { exit: 3, kind: "Io".into(), message: format!("{}: {e}", path.display()) }
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let mut out = Outputs::new(&cli.out)?;
    let (name, ran) = match cli.command {
        Command::Orbits { common, n, budget } => {
            let mut cfg: config::OrbitsConfig = load(common.config.as_deref())?;
            set(&mut cfg.matrix, common.matrix);
            set(&mut cfg.n, n);
            set(&mut cfg.budget, budget);
            ("orbits", commands::orbits(cfg, &mut out)?)
        }
        Command::Field { common, n, seed, band, field } => {
            let mut cfg: config::FieldCommandConfig = load(common.config.as_deref())?;
            set(&mut cfg.matrix, common.matrix);
            set(&mut cfg.n, n);
            set(&mut cfg.seed, seed);
            if band.is_some() {
                cfg.band = band;
            }
            field.apply(&mut cfg.field);
            ("field", commands::field(cfg, &mut out)?)
        }
        Command::Trace { common, n, seed, c, xi, field } => {
            let mut cfg: config::TraceConfig = load(common.config.as_deref())?;
            set(&mut cfg.matrix, common.matrix);
            set(&mut cfg.n, n);
            set(&mut cfg.seed, seed);
            set(&mut cfg.c, c);
            if xi.is_some() {
                cfg.xi = xi;
            }
            field.apply(&mut cfg.field);
            ("trace", commands::trace(cfg, &mut out)?)
        }
        Command::Clt { common, n, seed, c, trials, covariance, covariance_draws, field } => {
            let mut cfg: anosov_trace::ExperimentConfig = load(common.config.as_deref())?;
            set(&mut cfg.matrix, common.matrix);
            set(&mut cfg.n, n);
            set(&mut cfg.seed, seed);
            set(&mut cfg.c, c);
            set(&mut cfg.trials, trials);
            set(&mut cfg.covariance_draws, covariance_draws);
            field.apply(&mut cfg.field);
            ("clt", commands::clt(cfg, covariance, &mut out)?)
        }
        Command::Pressure { common, betas, periods, budget } => {
            let mut cfg: config::PressureConfig = load(common.config.as_deref())?;
            set(&mut cfg.matrix, common.matrix);
            set(&mut cfg.betas, betas);
            set(&mut cfg.periods, periods);
            set(&mut cfg.budget, budget);
            ("pressure", commands::pressure(cfg, &mut out)?)
        }
        Command::Regime { common, alpha, c, periods, xi } => {
            let mut cfg: config::RegimeConfig = load(common.config.as_deref())?;
            set(&mut cfg.matrix, common.matrix);
            set(&mut cfg.alpha, alpha);
            set(&mut cfg.c, c);
            set(&mut cfg.periods, periods);
            if xi.is_some() {
                cfg.xi = xi;
            }
            ("regime", commands::regime(cfg, &mut out)?)
        }
    };
    let manifest = RunManifest::new(name, ran.seed, ran.config, &out, rayon::current_num_threads(), start.elapsed());
    let path = cli.out.join(format!("{name}.manifest.json"));
    let body = serde_json::to_string_pretty(&manifest).expect("serializable manifest");
    std::fs::write(&path, body + "\n").map_err(|e| CliError::io(&path, e))?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global().expect("global pool set once");
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = json!({ "error": { "kind": e.kind, "message": e.message, "exit_code": e.exit } });
            eprintln!("{body}");
            ExitCode::from(e.exit)
        }
    }
}
