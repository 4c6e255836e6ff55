//! Stage 1: bound the candidate set.
//!
//! From the first half of the data we compute the pair statistic D, the
//! centroid p, and a radius R such that the ball C(p, R) contains the true
//! simplex with high probability.
//!
//! The radius formula needs the signal-to-noise ratio SNR = Vol^(1/K)/σ,
//! which depends on the unknown simplex volume. Three provenance modes are
//! supported: oracle (true volume known, experiment mode), config
//! (user-supplied SNR), and plug-in (volume root estimated from D via the
//! noiseless relation E[D] ~ K²·Vol^(2/K)/(4e²(K+1)(K+2)) + K·σ²).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::NoisyDataset;
use crate::simplex::IsoperimetryParams;
use crate::Provenance;

/// Finite stand-in for SNR = ∞ when σ = 0.
pub const NOISELESS_SNR: f64 = 1e12;

/// Default floor for the plug-in volume-root estimate, as a multiple of σ.
pub const PLUG_IN_FLOOR_FACTOR: f64 = 1e-3;

/// Resolved noise model: σ plus the SNR actually used, with its provenance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub snr: f64,
    pub source: Provenance,
}

impl NoiseModel {
    fn validated(self) -> Result<Self> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "sigma must be >= 0 and finite, got {}",
                self.sigma
            )));
        }
        if !(self.snr > 0.0) {
            return Err(Error::Parameter(format!(
                "snr must be > 0, got {}",
                self.snr
            )));
        }
        Ok(self)
    }

    /// Experiment mode: the true unit-volume root is known.
    pub fn oracle(sigma: f64, vol_root: f64) -> Result<Self> {
        let snr = if sigma == 0.0 {
            NOISELESS_SNR
        } else {
            vol_root / sigma
        };
        NoiseModel {
            sigma,
            snr,
            source: Provenance::Oracle,
        }
        .validated()
    }

    /// User-supplied SNR.
    pub fn from_config(sigma: f64, snr: f64) -> Result<Self> {
        NoiseModel {
            sigma,
            snr,
            source: Provenance::Config,
        }
        .validated()
    }

    /// Estimate the SNR from the pair statistic itself.
    pub fn plug_in(sigma: f64, d_stat: f64, dim: usize, floor: Option<f64>) -> Result<Self> {
        let vol_root = plug_in_vol_root(d_stat, dim, sigma, floor);
        let snr = if sigma == 0.0 {
            NOISELESS_SNR
        } else {
            vol_root / sigma
        };
        NoiseModel {
            sigma,
            snr,
            source: Provenance::PlugIn,
        }
        .validated()
    }
}

/// Volume-root estimate from D: invert E[D] - K·σ² >= K²·Vol^(2/K)/(4e²(K+1)(K+2)).
/// Clamped below at `floor` (default σ·1e-3, or 1e-12 when σ = 0).
pub fn plug_in_vol_root(d_stat: f64, dim: usize, sigma: f64, floor: Option<f64>) -> f64 {
    let k = dim as f64;
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let floor = floor.unwrap_or(if sigma > 0.0 {
        sigma * PLUG_IN_FLOOR_FACTOR
    } else {
        1e-12
    });
    let excess = (d_stat - k * sigma * sigma).max(0.0);
    let vol_two_over_k = 4.0 * e2 * (k + 1.0) * (k + 2.0) * excess / (k * k);
    vol_two_over_k.sqrt().max(floor)
}

/// Diagnostics attached to a bounding ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallDiagnostics {
    /// Pair statistic D.
    pub d_stat: f64,
    /// Number of disjoint pairs m (sample count = 2m).
    pub pair_count: usize,
    pub snr_used: f64,
    pub snr_source: Provenance,
    pub delta_used: f64,
    /// Radius denominator actually evaluated.
    pub denominator: f64,
    /// The -4/(θ̲·SNR) denominator term follows the derivation chain rather
    /// than the looser -4/(3θ̲·SNR) variant; kept as a flag for audit.
    pub denominator_variant: String,
    /// Whether the sample-count gate was enforced.
    pub strict: bool,
    /// Set when running below the sample-count threshold in fast mode.
    pub heuristic: bool,
}

/// A ball C(p, R) that is believed to contain the true simplex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundingBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub diagnostics: BallDiagnostics,
}

impl BoundingBall {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        let d2: f64 = self
            .center
            .iter()
            .zip(x)
            .map(|(c, v)| (c - v) * (c - v))
            .sum();
        d2.sqrt() <= self.radius
    }
}

/// Pair statistic D = (1/2m)·Σ_{i=1..m} ||y_{2i} - y_{2i-1}||².
///
/// Points are consumed in order as (y1,y2), (y3,y4), ...; invariant under
/// swaps within a pair and permutations of pairs.
pub fn pair_statistic_d(points: &[Vec<f64>]) -> Result<f64> {
    let n = points.len();
    if n % 2 != 0 {
        return Err(Error::OddPairCount { count: n });
    }
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let sum: f64 = points
        .chunks_exact(2)
        .map(|pair| {
            pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    Ok(sum / n as f64)
}

/// Coordinate-wise arithmetic mean p = (1/n)·Σ y_i.
pub fn centroid(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = points.first() else {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    };
    let mut c = vec![0.0; first.len()];
    for p in points {
        for (ci, x) in c.iter_mut().zip(p) {
            *ci += x;
        }
    }
    let n = points.len() as f64;
    c.iter_mut().for_each(|x| *x /= n);
    Ok(c)
}

/// Minimum pair count m >= 72·θ̲⁴·e⁴·((K+1)(K+2)/K)²·log(12/δ), rounded up.
///
/// Saturates at `u64::MAX` for extreme parameters.
pub fn min_samples_lemma1(dim: usize, theta_lower: f64, delta: f64) -> Result<u64> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    if !(theta_lower > 0.0) {
        return Err(Error::Parameter(format!(
            "theta_lower must be > 0, got {theta_lower}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    let k = dim as f64;
    let e4 = std::f64::consts::E.powi(4);
    let shape = (k + 1.0) * (k + 2.0) / k;
    let value = 72.0 * theta_lower.powi(4) * e4 * shape * shape * (12.0 / delta).ln();
    Ok(value.ceil() as u64)
}

/// Largest SNR at which the radius denominator is still nonpositive;
/// above this value the formula is usable.
pub fn critical_snr(dim: usize, theta_lower: f64) -> f64 {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let k = dim as f64;
    // denom(s) = 1 - (4/θ̲)u + 4e²(K-2)u² with u = 1/s.
    let a = 4.0 * e2 * (k - 2.0);
    let b = -4.0 / theta_lower;
    if dim == 2 {
        return 4.0 / theta_lower;
    }
    let disc = b * b - 4.0 * a;
    if a > 0.0 && disc <= 0.0 {
        return 0.0; // denominator positive for every SNR
    }
    // Smaller positive root of a·u² + b·u + 1 = 0.
    let u = if a < 0.0 {
        // K = 1: single positive root.
        (-b - disc.sqrt()) / (2.0 * a)
    } else {
        2.0 / (-b + disc.sqrt())
    };
    1.0 / u
}

/// Radius R = sqrt(4e²(K+1)(K+2)·θ̲²·D / denom) · (1 + θ̄/(θ̲²·e²·SNR·√K))
/// with denom = 1 + 4e²(K-2)/SNR² - 4/(θ̲·SNR).
///
/// Strictly increasing in D; errors when the denominator is nonpositive.
pub fn bounding_radius(
    d_stat: f64,
    dim: usize,
    params: &IsoperimetryParams,
    noise: &NoiseModel,
) -> Result<f64> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    if !(d_stat >= 0.0) {
        return Err(Error::Parameter(format!("D must be >= 0, got {d_stat}")));
    }
    let k = dim as f64;
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let tl = params.theta_lower;
    let snr = noise.snr;
    let denominator = 1.0 + 4.0 * e2 * (k - 2.0) / (snr * snr) - 4.0 / (tl * snr);
    if denominator <= 0.0 {
        return Err(Error::SnrTooLow {
            denominator,
            critical_snr: critical_snr(dim, tl),
            dim,
            theta_lower: tl,
        });
    }
    let core = (4.0 * e2 * (k + 1.0) * (k + 2.0) * tl * tl * d_stat / denominator).sqrt();
    let shift = 1.0 + params.theta_upper / (tl * tl * e2 * snr * k.sqrt());
    Ok(core * shift)
}

/// Compose the pair statistic, centroid, and radius into a bounding ball.
///
/// In strict mode the first half must contain at least 2·m points for the
/// Lemma-level threshold m; in fast mode smaller inputs are allowed and the
/// ball is tagged heuristic (a warning is logged).
pub fn bounding_ball(
    first_half: &NoisyDataset,
    params: &IsoperimetryParams,
    noise: &NoiseModel,
    delta: f64,
    strict: bool,
) -> Result<BoundingBall> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    let n = first_half.len();
    let threshold = min_samples_lemma1(first_half.dim, params.theta_lower, delta)?;
    let needed = threshold.saturating_mul(2);
    let heuristic = (n as u64) < needed;
    if heuristic {
        if strict {
            return Err(Error::InsufficientData {
                needed: needed.min(usize::MAX as u64) as usize,
                got: n,
            });
        }
        log::warn!(
            "bounding ball running below the sample threshold ({n} < {needed}); \
             result is heuristic"
        );
    }
    // Drop a trailing odd point so pairs are well formed.
    let usable = &first_half.points[..n - n % 2];
    let d_stat = pair_statistic_d(usable)?;
    if d_stat <= 0.0 {
        return Err(Error::DegenerateData);
    }
    let center = centroid(usable)?;
    let radius = bounding_radius(d_stat, first_half.dim, params, noise)?;
    let k = first_half.dim as f64;
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let denominator =
        1.0 + 4.0 * e2 * (k - 2.0) / (noise.snr * noise.snr) - 4.0 / (params.theta_lower * noise.snr);
    Ok(BoundingBall {
        center,
        radius,
        diagnostics: BallDiagnostics {
            d_stat,
            pair_count: usable.len() / 2,
            snr_used: noise.snr,
            snr_source: noise.source,
            delta_used: delta,
            denominator,
            denominator_variant: "derivation-chain".into(),
            strict,
            heuristic,
        },
    })
}
