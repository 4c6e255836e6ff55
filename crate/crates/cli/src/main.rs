//! `simplexlearn`: dataset generation, pipeline runs, TV evaluation, and
//! experiment sweeps for simplex learning from noisy samples.
//!
//! Exit codes: 0 success, 1 domain errors, 2 usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use simplex_learn::metrics::MeasureMode;
use simplex_learn::quantize::{CoveringMethod, DEFAULT_COVERING_CAP};

use simplex_learn_cli::run;

#[derive(Parser)]
#[command(
    name = "simplexlearn",
    version,
    about = "Learn a simplex from noisy uniform samples: bound, quantize, select"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a noisy dataset from a reference simplex.
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reference simplex (.json or .csv).
        #[arg(long)]
        truth: PathBuf,
        /// Output dataset (.csv or .json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full pipeline on a dataset.
    Learn {
        #[arg(long)]
        data: PathBuf,
        /// Flat key = value config file; flags override file values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        eps_rep: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        covering: Option<String>,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        include_timings: bool,
        /// Extra config overrides as KEY=VALUE (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Total-variation distance between two simplex files.
    Eval {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bounding ball from a dataset (first pipeline stage only).
    Bound {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        theta_lower: f64,
        #[arg(long)]
        theta_upper: f64,
        #[arg(long)]
        snr: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Covering set of a ball file.
    Cover {
        #[arg(long)]
        ball: PathBuf,
        /// Covering resolution eps_cov.
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "grid")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_COVERING_CAP)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample-complexity calculators.
    Complexity {
        /// thm1 (selection), thm2 (ball-confined), thm3 (end-to-end).
        #[arg(long)]
        formula: String,
        /// Family size (thm1).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        theta_lower: Option<f64>,
        #[arg(long)]
        theta_upper: Option<f64>,
        /// R / Vol^(1/K) (thm2, thm3).
        #[arg(long)]
        ratio: Option<f64>,
        /// Substitute the closed-form radius cap at this SNR (thm3).
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Run a config grid and write one CSV row per (cell, seed).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn parse_mode(s: &str) -> Result<MeasureMode, simplex_learn::Error> {
    match s {
        "exact" => Ok(MeasureMode::Exact),
        "mc" => Ok(MeasureMode::Mc),
        other => Err(simplex_learn::Error::Parameter(format!(
            "unknown mode '{other}' (expected exact|mc)"
        ))),
    }
}

fn dispatch(cli: Cli) -> simplex_learn::Result<()> {
    match cli.command {
        Command::Gen {
            dim,
            n,
            sigma,
            seed,
            truth,
            out,
        } => run::cmd_gen(dim, n, sigma, seed, &truth, &out),
        Command::Learn {
            data,
            config,
            out,
            threads,
            seed,
            eps_rep,
            delta,
            covering,
            truth,
            strict,
            include_timings,
            set,
        } => {
            let mut overrides: Vec<(String, String)> = Vec::new();
            if let Some(v) = seed {
                overrides.push(("seed".into(), v.to_string()));
            }
            if let Some(v) = eps_rep {
                overrides.push(("eps_rep".into(), v.to_string()));
            }
            if let Some(v) = delta {
                overrides.push(("delta".into(), v.to_string()));
            }
            if let Some(v) = covering {
                overrides.push(("covering".into(), v));
            }
            if let Some(v) = truth {
                overrides.push(("truth".into(), v.display().to_string()));
            }
            if strict {
                overrides.push(("strict".into(), "true".into()));
            }
            if include_timings {
                overrides.push(("include_timings".into(), "true".into()));
            }
            for kv in set {
                let (k, v) = kv.split_once('=').ok_or_else(|| {
                    simplex_learn::Error::Parameter(format!("--set expects KEY=VALUE, got '{kv}'"))
                })?;
                overrides.push((k.trim().to_string(), v.trim().to_string()));
            }
            run::cmd_learn(&data, config.as_deref(), &overrides, out.as_deref(), threads)
        }
        Command::Eval {
            a,
            b,
            mode,
            budget,
            seed,
        } => run::cmd_eval(&a, &b, parse_mode(&mode)?, budget, seed),
        Command::Bound {
            data,
            theta_lower,
            theta_upper,
            snr,
            delta,
            strict,
            out,
        } => run::cmd_bound(&data, theta_lower, theta_upper, snr, delta, strict, out.as_deref()),
        Command::Cover {
            ball,
            eps,
            method,
            seed,
            cap,
            out,
        } => {
            let method: CoveringMethod = method.parse()?;
            run::cmd_cover(&ball, eps, method, seed, cap, out.as_deref())
        }
        Command::Complexity {
            formula,
            m,
            dim,
            theta_lower,
            theta_upper,
            ratio,
            snr,
            eps,
            delta,
        } => run::cmd_complexity(&run::ComplexityInputs {
            formula,
            m,
            dim,
            theta_lower,
            theta_upper,
            ratio,
            snr,
            eps,
            delta,
        }),
        Command::Sweep {
            config,
            out,
            threads,
        } => run::cmd_sweep(&config, &out, threads),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(1)
        }
    }
}
