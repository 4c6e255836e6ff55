//! End-to-end harness: configuration, the `learn` pipeline
//! (split → bound → quantize → select), and experiment sweeps.
//!
//! A run is fully deterministic given the dataset and `seed`: covering
//! generation, MC measures, and evaluation each draw from fixed substreams,
//! and all parallel reductions are order-independent. Sweep cells are keyed
//! by their parameters and trial seed only, so duplicate cells produce
//! identical rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounding::{
    bounding_ball, min_samples_lemma1, pair_statistic_d, plug_in_vol_root, BoundingBall,
    NoiseModel,
};
use crate::error::{Error, Result};
use crate::metrics::{
    lemma3_bound, sample_complexity_thm2, tv_uniform, GuaranteeRecord, MeasureMode,
};
use crate::quantize::{
    enumerate_candidates, grid_covering, random_covering, CandidateFilters, CoveringMethod,
    QuantizationParams, DEFAULT_CANDIDATE_CAP, DEFAULT_COVERING_CAP, DEFAULT_ISO_SLACK,
};
use crate::rng::RngStream;
use crate::sampling::{generate, split_half, NoisyDataset};
use crate::select::{
    min_samples_selection, scheffe_tournament, SelectionReport, TournamentConfig,
    DEFAULT_CONTEST_RECORD_CAP,
};
use crate::simplex::{IsoperimetryParams, Simplex};
use crate::Provenance;

const STREAM_COVER: u64 = 0x10;
const STREAM_SELECT: u64 = 0x11;
const STREAM_EVAL: u64 = 0x12;

/// All pipeline knobs. Defaults follow the fast-mode harness; the acceptance
/// suite overrides where a criterion demands it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub n: usize,
    /// Exactly one of `sigma` / `snr` must be given; the other is resolved
    /// from the volume root.
    pub sigma: Option<f64>,
    pub snr: Option<f64>,
    /// Trial seeds (sweeps and repeated experiments).
    pub seeds: Vec<u64>,
    /// Master seed for run-internal randomness.
    pub seed: u64,
    pub theta_lower: f64,
    pub theta_upper: f64,
    /// Target TV resolution ε of the candidate family.
    pub eps_rep: f64,
    pub delta: f64,
    pub covering: CoveringMethod,
    /// Provenance of the volume-root estimate feeding α and SNR.
    pub vol_mode: Provenance,
    /// Volume root for `config` mode (resolved value echoed after a run).
    pub vol_root: Option<f64>,
    /// Per-pair MC budget (tournament and TV evaluation above dim 2).
    pub mc_budget: usize,
    pub outer_budget: usize,
    pub inner_budget: usize,
    pub covering_cap: u64,
    pub candidate_cap: u64,
    /// Relaxed isoperimetry filter slack; `None` disables the filter.
    pub iso_slack: Option<f64>,
    pub strict: bool,
    /// Path of the reference simplex (oracle mode); loaded into `truth`.
    pub truth_path: Option<String>,
    #[serde(skip)]
    pub truth: Option<Simplex>,
    pub out: Option<String>,
    /// Thread cap (0 = library default).
    pub threads: usize,
    pub contest_record_cap: usize,
    /// Include stage timings in the serialized result (off by default so
    /// result files are byte-reproducible).
    pub include_timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            n: 1000,
            sigma: None,
            snr: None,
            seeds: vec![0],
            seed: 0,
            theta_lower: 1.0,
            theta_upper: 1.0,
            eps_rep: 0.2,
            delta: 0.1,
            covering: CoveringMethod::Grid,
            vol_mode: Provenance::Oracle,
            vol_root: None,
            mc_budget: 20_000,
            outer_budget: 5_000,
            inner_budget: 5_000,
            covering_cap: DEFAULT_COVERING_CAP,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            iso_slack: Some(DEFAULT_ISO_SLACK),
            strict: false,
            truth_path: None,
            truth: None,
            out: None,
            threads: 0,
            contest_record_cap: DEFAULT_CONTEST_RECORD_CAP,
            include_timings: false,
        }
    }
}

/// Flat `key = value` configuration source with `#` comments. CLI flags are
/// applied on top of file values.
#[derive(Clone, Debug, Default)]
pub struct ConfigBuilder {
    values: BTreeMap<String, String>,
}

impl ConfigBuilder {
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut b = ConfigBuilder::default();
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "config line {}: expected 'key = value', found '{raw}'",
                    lineno + 1
                )));
            };
            b.set(key.trim(), value.trim());
        }
        Ok(b)
    }

    pub fn set(&mut self, key: &str, value: &str) -> &mut Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    fn take_scalar<T: std::str::FromStr>(
        &self,
        key: &str,
        seen: &mut Vec<String>,
    ) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        seen.push(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::Parse(format!("config key '{key}': {e}"))),
        }
    }

    fn take_list_f64(&self, key: &str, seen: &mut Vec<String>) -> Result<Option<Vec<f64>>> {
        seen.push(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("config key '{key}': {e}")))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }

    fn take_list_usize(&self, key: &str, seen: &mut Vec<String>) -> Result<Option<Vec<usize>>> {
        seen.push(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("config key '{key}': {e}")))
                })
                .collect::<Result<Vec<usize>>>()
                .map(Some),
        }
    }

    /// Seed lists accept `a,b,c` and `lo..hi` (half-open) forms.
    fn take_seeds(&self, key: &str, seen: &mut Vec<String>) -> Result<Option<Vec<u64>>> {
        seen.push(key.to_string());
        let Some(v) = self.values.get(key) else {
            return Ok(None);
        };
        if let Some((lo, hi)) = v.split_once("..") {
            let lo: u64 = lo
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("config key '{key}': {e}")))?;
            let hi: u64 = hi
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("config key '{key}': {e}")))?;
            if hi <= lo {
                return Err(Error::Parse(format!(
                    "config key '{key}': empty range {lo}..{hi}"
                )));
            }
            return Ok(Some((lo..hi).collect()));
        }
        v.split(',')
            .map(|f| {
                f.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("config key '{key}': {e}")))
            })
            .collect::<Result<Vec<u64>>>()
            .map(Some)
    }

    fn reject_unknown(&self, seen: &[String]) -> Result<()> {
        for key in self.values.keys() {
            if !seen.iter().any(|s| s == key) {
                return Err(Error::Parse(format!("unknown config key '{key}'")));
            }
        }
        Ok(())
    }

    /// Build a single-run configuration; grid-valued keys must be scalars.
    pub fn build_experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = Vec::new();
        if let Some(v) = self.take_scalar::<usize>("dim", &mut seen)? {
            cfg.dim = v;
        }
        if let Some(v) = self.take_list_usize("n", &mut seen)? {
            if v.len() != 1 {
                return Err(Error::Parse("config key 'n' must be a single value".into()));
            }
            cfg.n = v[0];
        }
        if let Some(v) = self.take_list_f64("sigma", &mut seen)? {
            if v.len() != 1 {
                return Err(Error::Parse(
                    "config key 'sigma' must be a single value".into(),
                ));
            }
            cfg.sigma = Some(v[0]);
        }
        if let Some(v) = self.take_list_f64("snr", &mut seen)? {
            if v.len() != 1 {
                return Err(Error::Parse(
                    "config key 'snr' must be a single value".into(),
                ));
            }
            cfg.snr = Some(v[0]);
        }
        if let Some(v) = self.take_list_f64("eps_rep", &mut seen)? {
            if v.len() != 1 {
                return Err(Error::Parse(
                    "config key 'eps_rep' must be a single value".into(),
                ));
            }
            cfg.eps_rep = v[0];
        }
        self.fill_common(&mut cfg, &mut seen)?;
        self.reject_unknown(&seen)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn fill_common(&self, cfg: &mut ExperimentConfig, seen: &mut Vec<String>) -> Result<()> {
        if let Some(v) = self.take_seeds("seeds", seen)? {
            cfg.seeds = v;
        }
        if let Some(v) = self.take_scalar::<u64>("seed", seen)? {
            cfg.seed = v;
        }
        if let Some(v) = self.take_scalar::<f64>("theta_lower", seen)? {
            cfg.theta_lower = v;
        }
        if let Some(v) = self.take_scalar::<f64>("theta_upper", seen)? {
            cfg.theta_upper = v;
        }
        if let Some(v) = self.take_scalar::<f64>("delta", seen)? {
            cfg.delta = v;
        }
        if let Some(v) = self.take_scalar::<String>("covering", seen)? {
            cfg.covering = v.parse()?;
        }
        if let Some(v) = self.take_scalar::<String>("vol_mode", seen)? {
            cfg.vol_mode = match v.as_str() {
                "oracle" => Provenance::Oracle,
                "config" => Provenance::Config,
                "plug-in" | "plugin" => Provenance::PlugIn,
                other => {
                    return Err(Error::Parse(format!(
                        "config key 'vol_mode': unknown mode '{other}'"
                    )))
                }
            };
        }
        if let Some(v) = self.take_scalar::<f64>("vol_root", seen)? {
            cfg.vol_root = Some(v);
        }
        if let Some(v) = self.take_scalar::<usize>("mc_budget", seen)? {
            cfg.mc_budget = v;
        }
        if let Some(v) = self.take_scalar::<usize>("outer_budget", seen)? {
            cfg.outer_budget = v;
        }
        if let Some(v) = self.take_scalar::<usize>("inner_budget", seen)? {
            cfg.inner_budget = v;
        }
        if let Some(v) = self.take_scalar::<u64>("covering_cap", seen)? {
            cfg.covering_cap = v;
        }
        if let Some(v) = self.take_scalar::<u64>("candidate_cap", seen)? {
            cfg.candidate_cap = v;
        }
        seen.push("iso_slack".into());
        if let Some(v) = self.values.get("iso_slack") {
            cfg.iso_slack = match v.as_str() {
                "none" | "off" => None,
                other => Some(other.parse::<f64>().map_err(|e| {
                    Error::Parse(format!("config key 'iso_slack': {e} (or use 'none')"))
                })?),
            };
        }
        if let Some(v) = self.take_scalar::<bool>("strict", seen)? {
            cfg.strict = v;
        }
        if let Some(v) = self.take_scalar::<String>("truth", seen)? {
            cfg.truth_path = Some(v);
        }
        if let Some(v) = self.take_scalar::<String>("out", seen)? {
            cfg.out = Some(v);
        }
        if let Some(v) = self.take_scalar::<usize>("threads", seen)? {
            cfg.threads = v;
        }
        if let Some(v) = self.take_scalar::<usize>("contest_record_cap", seen)? {
            cfg.contest_record_cap = v;
        }
        if let Some(v) = self.take_scalar::<bool>("include_timings", seen)? {
            cfg.include_timings = v;
        }
        Ok(())
    }

    /// Build a sweep configuration; `n`, `sigma`/`snr`, and `eps_rep` may be
    /// comma lists forming the grid.
    pub fn build_sweep(&self) -> Result<SweepConfig> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = Vec::new();
        if let Some(v) = self.take_scalar::<usize>("dim", &mut seen)? {
            cfg.dim = v;
        }
        let n_values = self
            .take_list_usize("n", &mut seen)?
            .unwrap_or_else(|| vec![cfg.n]);
        let sigma_values = self.take_list_f64("sigma", &mut seen)?.unwrap_or_default();
        let snr_values = self.take_list_f64("snr", &mut seen)?.unwrap_or_default();
        let eps_values = self
            .take_list_f64("eps_rep", &mut seen)?
            .unwrap_or_else(|| vec![cfg.eps_rep]);
        self.fill_common(&mut cfg, &mut seen)?;
        self.reject_unknown(&seen)?;
        let sweep = SweepConfig {
            base: cfg,
            n_values,
            sigma_values,
            snr_values,
            eps_values,
        };
        sweep.validate()?;
        Ok(sweep)
    }
}

impl ExperimentConfig {
    /// Load the truth simplex if a path is configured and none is set.
    pub fn load_truth(&mut self) -> Result<()> {
        if self.truth.is_none() {
            if let Some(path) = &self.truth_path {
                self.truth = Some(crate::io::load_simplex(Path::new(path))?);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.dim) {
            return Err(Error::Parameter(format!(
                "dim must be in 1..=4 (supported envelope), got {}",
                self.dim
            )));
        }
        if self.sigma.is_some() == self.snr.is_some() {
            return Err(Error::Parameter(
                "exactly one of sigma / snr must be configured".into(),
            ));
        }
        if let Some(s) = self.sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::Parameter(format!("sigma must be >= 0, got {s}")));
            }
        }
        if let Some(s) = self.snr {
            if !(s > 0.0) {
                return Err(Error::Parameter(format!("snr must be > 0, got {s}")));
            }
        }
        IsoperimetryParams::new(self.theta_lower, self.theta_upper)?;
        if !(self.eps_rep > 0.0 && self.eps_rep < 1.0) {
            return Err(Error::Parameter(format!(
                "eps_rep must be in (0,1), got {}",
                self.eps_rep
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!(
                "delta must be in (0,1), got {}",
                self.delta
            )));
        }
        if self.vol_mode == Provenance::Config && self.vol_root.is_none() {
            return Err(Error::Parameter(
                "vol_mode = config requires vol_root".into(),
            ));
        }
        if self.vol_mode == Provenance::PlugIn && self.sigma.is_none() {
            return Err(Error::Parameter(
                "vol_mode = plug-in requires sigma (snr is estimated from the data)".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::Parameter("seeds must be nonempty".into()));
        }
        if self.mc_budget < 1_000 || self.outer_budget < 1_000 || self.inner_budget < 1_000 {
            return Err(Error::Parameter(
                "mc_budget, outer_budget, inner_budget must be >= 1000".into(),
            ));
        }
        Ok(())
    }

    fn isoperimetry(&self) -> IsoperimetryParams {
        IsoperimetryParams {
            theta_lower: self.theta_lower,
            theta_upper: self.theta_upper,
        }
    }
}

/// Wall-clock per stage, milliseconds.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub split_ms: f64,
    pub bounding_ms: f64,
    pub covering_ms: f64,
    pub enumerate_ms: f64,
    pub tournament_ms: f64,
    pub evaluate_ms: f64,
    pub total_ms: f64,
}

/// Outcome of one `learn` run. Serialization is byte-reproducible for a
/// fixed dataset/config/seed; timings are included only when the config asks
/// for them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub learned: Simplex,
    pub ball: BoundingBall,
    pub family_size: usize,
    pub quantization: QuantizationParams,
    pub selection: SelectionReport,
    /// Exact (dim <= 2) or MC TV between the learned simplex and the truth.
    pub tv_to_truth: Option<f64>,
    /// Best TV achievable inside the family (oracle mode, dim <= 2).
    pub min_family_tv: Option<f64>,
    pub guarantee: GuaranteeRecord,
    pub config: ExperimentConfig,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<StageTimings>,
}

fn ms(from: Instant) -> f64 {
    from.elapsed().as_secs_f64() * 1e3
}

/// Run the full pipeline on a dataset: split the data, bound the simplex,
/// quantize the ball into a candidate family, and select by tournament
/// against the held-out half.
pub fn learn(dataset: &NoisyDataset, config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    if dataset.dim != config.dim {
        return Err(Error::DimensionMismatch {
            expected: config.dim,
            got: dataset.dim,
        });
    }
    let truth = dataset.truth.as_ref().or(config.truth.as_ref());
    let params = config.isoperimetry();
    let root = RngStream::root(config.seed);
    let mut timings = StageTimings::default();
    let t_total = Instant::now();

    // Split.
    let t = Instant::now();
    let (first, second) = split_half(dataset)
        .map_err(|e| e.in_stage("split", "the dataset needs at least 2 points"))?;
    timings.split_ms = ms(t);

    // Resolve the noise model and volume root, then bound.
    let t = Instant::now();
    let even = &first.points[..first.len() - first.len() % 2];
    let d_stat = pair_statistic_d(even)
        .map_err(|e| e.in_stage("bounding", "the first half must contain a pair of points"))?;
    let (noise, vol_root) = resolve_noise(config, truth, d_stat)
        .map_err(|e| e.in_stage("bounding", "check sigma/snr, vol_mode, and truth settings"))?;
    let ball = bounding_ball(&first, &params, &noise, config.delta, config.strict).map_err(|e| {
        e.in_stage(
            "bounding",
            "raise snr (or relax theta_lower), or provide more data",
        )
    })?;
    timings.bounding_ms = ms(t);

    // Quantize.
    let t = Instant::now();
    let qp = QuantizationParams::new(
        config.eps_rep,
        vol_root,
        config.vol_mode,
        config.theta_upper,
        config.dim,
    )
    .map_err(|e| e.in_stage("quantize", "check eps_rep and theta_upper"))?;
    let covering = match config.covering {
        CoveringMethod::Grid => grid_covering(&ball, qp.eps_cov, config.covering_cap),
        CoveringMethod::Random => random_covering(
            &ball,
            qp.eps_cov,
            config.covering_cap,
            root.substream(STREAM_COVER),
        ),
    }
    .map_err(|e| {
        e.in_stage(
            "quantize",
            "raise eps_rep or the covering cap, or lower dim",
        )
    })?;
    timings.covering_ms = ms(t);

    let t = Instant::now();
    let filters = CandidateFilters {
        volume_floor: None,
        isoperimetry: config.iso_slack.map(|s| (params, s)),
        candidate_cap: config.candidate_cap,
    };
    let family = enumerate_candidates(&covering, &filters).map_err(|e| {
        e.in_stage(
            "enumerate",
            "raise eps_rep, raise the candidate cap, or relax filters",
        )
    })?;
    let candidates = family.materialize();
    timings.enumerate_ms = ms(t);

    // Select.
    let t = Instant::now();
    let mode = if config.dim <= 2 {
        MeasureMode::Exact
    } else {
        MeasureMode::Mc
    };
    let tournament_cfg = TournamentConfig {
        mode,
        budget: config.mc_budget,
        contest_record_cap: config.contest_record_cap,
        delta: config.delta,
        force_generic: false,
    };
    let selection = scheffe_tournament(
        &candidates,
        &second.points,
        &tournament_cfg,
        root.substream(STREAM_SELECT),
    )
    .map_err(|e| e.in_stage("select", "family and second half must be nonempty"))?;
    let learned = candidates[selection.winner].clone();
    timings.tournament_ms = ms(t);

    // Evaluate against the truth when available.
    let t = Instant::now();
    let (tv_to_truth, min_family_tv) = match truth {
        Some(s) => {
            let eval_stream = root.substream(STREAM_EVAL);
            let tv = tv_uniform(&learned, s, mode, config.mc_budget, eval_stream)
                .map_err(|e| e.in_stage("evaluate", "exact TV needs dim <= 2"))?
                .value;
            let min_tv = if config.dim <= 2 {
                Some(
                    candidates
                        .iter()
                        .map(|c| {
                            tv_uniform(c, s, MeasureMode::Exact, 0, eval_stream)
                                .map(|t| t.value)
                        })
                        .collect::<Result<Vec<f64>>>()?
                        .into_iter()
                        .fold(f64::INFINITY, f64::min),
                )
            } else {
                None
            };
            (Some(tv), min_tv)
        }
        None => (None, None),
    };
    timings.evaluate_ms = ms(t);
    timings.total_ms = ms(t_total);

    let guarantee = GuaranteeRecord {
        c1: 4.0,
        c2: 7.0,
        eps1: lemma3_bound(config.dim, config.theta_upper, noise.snr).ok(),
        eps2: config.eps_rep,
        delta: config.delta,
        n_required: sample_complexity_thm2(
            config.dim,
            config.theta_upper,
            ball.radius,
            vol_root,
            config.eps_rep,
            config.delta,
        )?,
    };

    let mut config_echo = config.clone();
    config_echo.sigma = Some(noise.sigma);
    config_echo.snr = Some(noise.snr);
    config_echo.vol_root = Some(vol_root);
    config_echo.truth = None;

    Ok(RunResult {
        learned,
        ball,
        family_size: candidates.len(),
        quantization: qp,
        selection,
        tv_to_truth,
        min_family_tv,
        guarantee,
        config: config_echo,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timings_ms: config.include_timings.then_some(timings),
    })
}

/// Resolve (noise model, volume root) from the configured provenance mode.
fn resolve_noise(
    config: &ExperimentConfig,
    truth: Option<&Simplex>,
    d_stat: f64,
) -> Result<(NoiseModel, f64)> {
    match config.vol_mode {
        Provenance::Oracle => {
            let truth = truth.ok_or_else(|| {
                Error::Parameter("vol_mode = oracle requires a truth simplex".into())
            })?;
            let vol_root = truth.vol_root();
            let sigma = match (config.sigma, config.snr) {
                (Some(s), None) => s,
                (None, Some(snr)) => vol_root / snr,
                _ => unreachable!("validated"),
            };
            Ok((NoiseModel::oracle(sigma, vol_root)?, vol_root))
        }
        Provenance::Config => {
            let vol_root = config.vol_root.expect("validated");
            let sigma = match (config.sigma, config.snr) {
                (Some(s), None) => s,
                (None, Some(snr)) => vol_root / snr,
                _ => unreachable!("validated"),
            };
            let snr = config
                .snr
                .unwrap_or(if sigma == 0.0 { f64::INFINITY } else { vol_root / sigma });
            let snr = if snr.is_finite() {
                snr
            } else {
                crate::bounding::NOISELESS_SNR
            };
            Ok((NoiseModel::from_config(sigma, snr)?, vol_root))
        }
        Provenance::PlugIn => {
            let sigma = config.sigma.expect("validated");
            let noise = NoiseModel::plug_in(sigma, d_stat, config.dim, None)?;
            let vol_root = plug_in_vol_root(d_stat, config.dim, sigma, None);
            Ok((noise, vol_root))
        }
    }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// A sweep grid over n, noise level (σ or SNR), and ε, crossed with seeds.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub n_values: Vec<usize>,
    pub sigma_values: Vec<f64>,
    pub snr_values: Vec<f64>,
    pub eps_values: Vec<f64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.eps_values.is_empty() {
            return Err(Error::Parameter("sweep grid must be nonempty".into()));
        }
        if self.sigma_values.is_empty() == self.snr_values.is_empty() {
            return Err(Error::Parameter(
                "exactly one of sigma / snr lists must be configured for a sweep".into(),
            ));
        }
        if self.base.seeds.is_empty() {
            return Err(Error::Parameter("seeds must be nonempty".into()));
        }
        Ok(())
    }

    /// Cell configurations in grid order (n outermost, then noise, then ε).
    pub fn cells(&self) -> Vec<ExperimentConfig> {
        let noise_axis: Vec<(Option<f64>, Option<f64>)> = if self.sigma_values.is_empty() {
            self.snr_values.iter().map(|&s| (None, Some(s))).collect()
        } else {
            self.sigma_values.iter().map(|&s| (Some(s), None)).collect()
        };
        let mut cells = Vec::new();
        for &n in &self.n_values {
            for &(sigma, snr) in &noise_axis {
                for &eps in &self.eps_values {
                    let mut cfg = self.base.clone();
                    cfg.n = n;
                    cfg.sigma = sigma;
                    cfg.snr = snr;
                    cfg.eps_rep = eps;
                    cells.push(cfg);
                }
            }
        }
        cells
    }
}

/// One sweep row: cell inputs, outcome metrics, calculator thresholds, and
/// an error column for failed cells.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub dim: usize,
    pub n: usize,
    pub sigma: Option<f64>,
    pub snr: Option<f64>,
    pub eps_rep: f64,
    pub delta: f64,
    pub seed: u64,
    pub covering: CoveringMethod,
    pub family_size: Option<usize>,
    pub radius: Option<f64>,
    pub d_stat: Option<f64>,
    pub tv_to_truth: Option<f64>,
    pub min_family_tv: Option<f64>,
    pub lemma3_bound: Option<f64>,
    pub n_thm1: Option<u64>,
    pub n_thm2: Option<u64>,
    pub m_lemma1: Option<u64>,
    pub error: Option<String>,
}

/// Fixed CSV column order (documented in the README).
pub const SWEEP_COLUMNS: [&str; 18] = [
    "dim",
    "n",
    "sigma",
    "snr",
    "eps_rep",
    "delta",
    "seed",
    "covering",
    "family_size",
    "radius",
    "d_stat",
    "tv_to_truth",
    "min_family_tv",
    "lemma3_bound",
    "n_thm1",
    "n_thm2",
    "m_lemma1",
    "error",
];

/// Run every (cell, seed) of the grid, in parallel, preserving grid order.
/// Per-cell failures become rows with the error column set; the sweep
/// continues. Row count is always |grid| × |seeds|.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let truth = match (&config.base.truth, &config.base.truth_path) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => crate::io::load_simplex(Path::new(path))?,
        (None, None) => {
            return Err(Error::Parameter(
                "sweep requires a truth simplex to generate datasets".into(),
            ))
        }
    };
    if truth.dim() != config.base.dim {
        return Err(Error::DimensionMismatch {
            expected: config.base.dim,
            got: truth.dim(),
        });
    }
    let mut jobs = Vec::new();
    for cell in config.cells() {
        for &seed in &config.base.seeds {
            jobs.push((cell.clone(), seed));
        }
    }
    let rows = jobs
        .par_iter()
        .map(|(cell, seed)| run_cell(cell, &truth, *seed))
        .collect();
    Ok(rows)
}

fn run_cell(cell: &ExperimentConfig, truth: &Simplex, seed: u64) -> SweepRow {
    let sigma = match (cell.sigma, cell.snr) {
        (Some(s), _) => s,
        (None, Some(snr)) => truth.vol_root() / snr,
        (None, None) => f64::NAN,
    };
    let mut cfg = cell.clone();
    cfg.truth = Some(truth.clone());
    // Rows must be identical for identical (cell, seed), so the run seed
    // depends on the trial seed only.
    cfg.seed = seed;
    let mut row = SweepRow {
        dim: cfg.dim,
        n: cfg.n,
        sigma: Some(sigma),
        snr: None,
        eps_rep: cfg.eps_rep,
        delta: cfg.delta,
        seed,
        covering: cfg.covering,
        family_size: None,
        radius: None,
        d_stat: None,
        tv_to_truth: None,
        min_family_tv: None,
        lemma3_bound: None,
        n_thm1: None,
        n_thm2: None,
        m_lemma1: None,
        error: None,
    };
    if !sigma.is_finite() {
        row.error = Some("no noise level configured".into());
        return row;
    }
    let dataset = generate(truth, cfg.n, sigma, seed);
    match learn(&dataset, &cfg) {
        Ok(result) => {
            row.snr = result.config.snr;
            row.family_size = Some(result.family_size);
            row.radius = Some(result.ball.radius);
            row.d_stat = Some(result.ball.diagnostics.d_stat);
            row.tv_to_truth = result.tv_to_truth;
            row.min_family_tv = result.min_family_tv;
            row.lemma3_bound = result.guarantee.eps1;
            row.n_thm1 =
                min_samples_selection(result.family_size, cfg.eps_rep, cfg.delta).ok();
            row.n_thm2 = Some(result.guarantee.n_required);
            row.m_lemma1 = min_samples_lemma1(cfg.dim, cfg.theta_lower, cfg.delta).ok();
        }
        Err(e) => {
            row.error = Some(e.to_string());
        }
    }
    row
}

fn opt_cell<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Render rows as CSV in the fixed column order.
pub fn sweep_rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = SWEEP_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let covering = match r.covering {
            CoveringMethod::Grid => "grid",
            CoveringMethod::Random => "random",
        };
        let error = r
            .error
            .as_deref()
            .map(|e| e.replace([',', '\n'], ";"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.dim,
            r.n,
            opt_cell(&r.sigma),
            opt_cell(&r.snr),
            r.eps_rep,
            r.delta,
            r.seed,
            covering,
            opt_cell(&r.family_size),
            opt_cell(&r.radius),
            opt_cell(&r.d_stat),
            opt_cell(&r.tv_to_truth),
            opt_cell(&r.min_family_tv),
            opt_cell(&r.lemma3_bound),
            opt_cell(&r.n_thm1),
            opt_cell(&r.n_thm2),
            opt_cell(&r.m_lemma1),
            error,
        );
    }
    out
}
