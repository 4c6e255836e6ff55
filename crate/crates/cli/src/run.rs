//! Subcommand implementations. Each returns a domain `Result`; usage errors
//! are clap's job and never reach here.

use std::path::{Path, PathBuf};

use simplex_learn::bounding::{bounding_ball, NoiseModel};
use simplex_learn::io;
use simplex_learn::metrics::{
    lemma1_radius_cap_ratio, sample_complexity_thm2, sample_complexity_thm3, tv_uniform,
    MeasureMode, FLAG_NATURAL_LOG, FLAG_THM2_VARIANT, FLAG_THM3_VARIANT,
};
use simplex_learn::pipeline::{learn, sweep, sweep_rows_to_csv, ConfigBuilder, ExperimentConfig};
use simplex_learn::quantize::{grid_covering, random_covering, CoveringMethod};
use simplex_learn::sampling::generate;
use simplex_learn::select::min_samples_selection;
use simplex_learn::simplex::IsoperimetryParams;
use simplex_learn::{Error, Result, RngStream};

/// Threads: flag > config > SIMPLEXLEARN_THREADS > library default.
pub fn resolve_threads(flag: Option<usize>, config_threads: usize) -> Option<usize> {
    if let Some(n) = flag {
        return (n > 0).then_some(n);
    }
    if config_threads > 0 {
        return Some(config_threads);
    }
    std::env::var("SIMPLEXLEARN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Run `f` inside a rayon pool of the resolved size (or the default pool).
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn emit(out: Option<&Path>, text: String) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

pub fn cmd_gen(
    dim: usize,
    n: usize,
    sigma: f64,
    seed: u64,
    truth: &Path,
    out: &Path,
) -> Result<()> {
    let truth = io::load_simplex(truth)?;
    if truth.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: truth.dim(),
        });
    }
    if sigma < 0.0 {
        return Err(Error::Parameter(format!("sigma must be >= 0, got {sigma}")));
    }
    let dataset = generate(&truth, n, sigma, seed);
    io::save_dataset(out, &dataset)?;
    log::info!("wrote {} points to {}", dataset.len(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_learn(
    data: &Path,
    config: Option<&Path>,
    overrides: &[(String, String)],
    out_flag: Option<&Path>,
    threads_flag: Option<usize>,
) -> Result<()> {
    let mut builder = match config {
        Some(path) => ConfigBuilder::from_file(path)?,
        None => ConfigBuilder::default(),
    };
    for (key, value) in overrides {
        builder.set(key, value);
    }
    let dataset = io::load_dataset(data)?;
    let mut builder = builder.clone();
    // The dataset fixes dim and usually the noise level; only fill what the
    // config left open.
    builder.set("dim", &dataset.dim.to_string());
    let mut cfg: ExperimentConfig = {
        // sigma/snr: if neither is configured, take sigma from the dataset.
        match builder.build_experiment() {
            Ok(cfg) => cfg,
            Err(_) => {
                builder.set("sigma", &dataset.sigma.to_string());
                builder.build_experiment()?
            }
        }
    };
    cfg.n = dataset.len();
    cfg.load_truth()?;
    let threads = resolve_threads(threads_flag, cfg.threads);
    let started = std::time::Instant::now();
    let result = with_pool(threads, || learn(&dataset, &cfg))??;
    log::info!(
        "learn finished in {:.1} ms (family size {})",
        started.elapsed().as_secs_f64() * 1e3,
        result.family_size
    );
    let text = serde_json::to_string_pretty(&result).map_err(Error::from)? + "\n";
    let out = out_flag
        .map(PathBuf::from)
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    emit(out.as_deref(), text)
}

pub fn cmd_eval(
    a: &Path,
    b: &Path,
    mode: MeasureMode,
    budget: usize,
    seed: u64,
) -> Result<()> {
    let sa = io::load_simplex(a)?;
    let sb = io::load_simplex(b)?;
    let tv = tv_uniform(&sa, &sb, mode, budget, RngStream::root(seed))?;
    println!("{}", serde_json::to_string_pretty(&tv)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_bound(
    data: &Path,
    theta_lower: f64,
    theta_upper: f64,
    snr: f64,
    delta: f64,
    strict: bool,
    out: Option<&Path>,
) -> Result<()> {
    let dataset = io::load_dataset(data)?;
    let params = IsoperimetryParams::new(theta_lower, theta_upper)?;
    let noise = NoiseModel::from_config(dataset.sigma, snr)?;
    let ball = bounding_ball(&dataset, &params, &noise, delta, strict)?;
    emit(out, serde_json::to_string_pretty(&ball)? + "\n")
}

pub fn cmd_cover(
    ball: &Path,
    eps: f64,
    method: CoveringMethod,
    seed: u64,
    cap: u64,
    out: Option<&Path>,
) -> Result<()> {
    let ball = io::load_ball(ball)?;
    let covering = match method {
        CoveringMethod::Grid => grid_covering(&ball, eps, cap)?,
        CoveringMethod::Random => random_covering(&ball, eps, cap, RngStream::root(seed))?,
    };
    log::info!("covering has {} points", covering.points.len());
    emit(out, serde_json::to_string_pretty(&covering)? + "\n")
}

pub struct ComplexityInputs {
    pub formula: String,
    pub m: Option<usize>,
    pub dim: Option<usize>,
    pub theta_lower: Option<f64>,
    pub theta_upper: Option<f64>,
    pub ratio: Option<f64>,
    pub snr: Option<f64>,
    pub eps: f64,
    pub delta: f64,
}

fn require<T: Copy>(v: Option<T>, name: &str, formula: &str) -> Result<T> {
    v.ok_or_else(|| Error::Parameter(format!("--{name} is required for formula {formula}")))
}

pub fn cmd_complexity(inputs: &ComplexityInputs) -> Result<()> {
    let mut flags = vec![FLAG_NATURAL_LOG.to_string()];
    let mut echo = serde_json::Map::new();
    echo.insert("eps".into(), inputs.eps.into());
    echo.insert("delta".into(), inputs.delta.into());
    let n = match inputs.formula.as_str() {
        "thm1" => {
            let m = require(inputs.m, "m", "thm1")?;
            echo.insert("m".into(), m.into());
            min_samples_selection(m, inputs.eps, inputs.delta)?
        }
        "thm2" => {
            let dim = require(inputs.dim, "dim", "thm2")?;
            let tu = require(inputs.theta_upper, "theta-upper", "thm2")?;
            let ratio = require(inputs.ratio, "ratio", "thm2")?;
            echo.insert("dim".into(), dim.into());
            echo.insert("theta_upper".into(), tu.into());
            echo.insert("ratio".into(), ratio.into());
            flags.push(FLAG_THM2_VARIANT.to_string());
            sample_complexity_thm2(dim, tu, ratio, 1.0, inputs.eps, inputs.delta)?
        }
        "thm3" => {
            let dim = require(inputs.dim, "dim", "thm3")?;
            let tl = require(inputs.theta_lower, "theta-lower", "thm3")?;
            let tu = require(inputs.theta_upper, "theta-upper", "thm3")?;
            echo.insert("dim".into(), dim.into());
            echo.insert("theta_lower".into(), tl.into());
            echo.insert("theta_upper".into(), tu.into());
            let ratio = match (inputs.ratio, inputs.snr) {
                (Some(r), _) => {
                    echo.insert("ratio".into(), r.into());
                    r
                }
                (None, Some(snr)) => {
                    // Substitute the closed-form radius cap at this SNR.
                    let r = lemma1_radius_cap_ratio(dim, tl, snr)?;
                    echo.insert("snr".into(), snr.into());
                    echo.insert("ratio".into(), r.into());
                    flags.push("radius=closed-form-cap".to_string());
                    r
                }
                (None, None) => {
                    return Err(Error::Parameter(
                        "--ratio or --snr is required for formula thm3".into(),
                    ))
                }
            };
            flags.push(FLAG_THM3_VARIANT.to_string());
            sample_complexity_thm3(dim, tl, tu, ratio, 1.0, inputs.eps, inputs.delta)?
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown formula '{other}' (expected thm1|thm2|thm3)"
            )))
        }
    };
    let payload = serde_json::json!({
        "n": n,
        "formula": inputs.formula,
        "inputs": echo,
        "flags": flags,
    });
    println!("{}", serde_json::to_string_pretty(&payload)?);
    Ok(())
}

pub fn cmd_sweep(config: &Path, out: &Path, threads_flag: Option<usize>) -> Result<()> {
    let builder = ConfigBuilder::from_file(config)?;
    let mut sweep_cfg = builder.build_sweep()?;
    sweep_cfg.base.load_truth()?;
    let threads = resolve_threads(threads_flag, sweep_cfg.base.threads);
    let rows = with_pool(threads, || sweep(&sweep_cfg))??;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    std::fs::write(out, sweep_rows_to_csv(&rows))?;
    log::info!(
        "sweep wrote {} rows to {} ({} failed cells)",
        rows.len(),
        out.display(),
        failed
    );
    Ok(())
}
