//! Total-variation distances (exact and Monte Carlo), intersection volumes,
//! the noise-gap bound, and the sample-complexity calculators.
//!
//! For uniform densities the TV distance has the closed form
//! `1 - I / max(Vol1, Vol2)` where `I` is the intersection volume; exact
//! intersection is available at K = 1 (interval overlap) and K = 2 (convex
//! polygon clipping + shoelace area), Monte Carlo covers higher dimensions.
//! All logarithms in the calculators are natural.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sampling::sample_uniform_simplex;
use crate::simplex::Simplex;

/// How a probability/volume was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureMode {
    /// Closed form; K <= 2 only.
    Exact,
    /// Monte Carlo with a sampling budget.
    Mc,
}

/// Method tag carried by a [`TvEstimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TvMethod {
    Exact,
    Mc,
    NestedMc,
}

/// A scalar estimate with its standard error (0 for exact values).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ValueWithSe {
    pub value: f64,
    pub std_error: f64,
}

/// Total-variation estimate in [0, 1] with method and budgets used.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TvEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: TvMethod,
    /// Sampling budgets: empty for exact, `[budget]` for MC,
    /// `[outer, inner]` for nested MC.
    pub budgets: Vec<usize>,
}

impl TvEstimate {
    fn exact(value: f64) -> Self {
        TvEstimate {
            value,
            std_error: 0.0,
            method: TvMethod::Exact,
            budgets: vec![],
        }
    }
}

/// Constants of the selection guarantee ‖P_learned - P_truth‖ <= c1·ε1 + c2·ε2
/// together with the inputs that instantiate it for a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GuaranteeRecord {
    pub c1: f64,
    pub c2: f64,
    /// Noise gap bound (None when the SNR is out of the bound's regime).
    pub eps1: Option<f64>,
    pub eps2: f64,
    pub delta: f64,
    pub n_required: u64,
}

pub const FLAG_NATURAL_LOG: &str = "log=natural";
pub const FLAG_THM2_VARIANT: &str = "numerator=2K(K+1) (statement form)";
pub const FLAG_THM3_VARIANT: &str = "numerator=K(K+1) (derivation form)";

fn check_same_dim(s1: &Simplex, s2: &Simplex) -> Result<()> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            got: s2.dim(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Intersection volume
// ---------------------------------------------------------------------------

fn interval_bounds(s: &Simplex) -> (f64, f64) {
    let a = s.vertices()[0][0];
    let b = s.vertices()[1][0];
    (a.min(b), a.max(b))
}

type P2 = [f64; 2];

fn polygon_area(poly: &[P2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        s += poly[i][0] * poly[j][1] - poly[j][0] * poly[i][1];
    }
    s / 2.0
}

/// Clip a polygon against the left half-plane of the directed edge a -> b.
fn clip_halfplane(poly: &[P2], a: P2, b: P2) -> Vec<P2> {
    let side = |p: P2| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let s = poly[i];
        let e = poly[(i + 1) % poly.len()];
        let sc = side(s);
        let ec = side(e);
        let cross = |sc: f64, ec: f64, s: P2, e: P2| -> P2 {
            let t = sc / (sc - ec);
            [s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])]
        };
        match (sc >= 0.0, ec >= 0.0) {
            (true, true) => out.push(e),
            (true, false) => out.push(cross(sc, ec, s, e)),
            (false, true) => {
                out.push(cross(sc, ec, s, e));
                out.push(e);
            }
            (false, false) => {}
        }
    }
    out
}

fn triangle_ccw(s: &Simplex) -> [P2; 3] {
    let v = s.vertices();
    let mut t = [[v[0][0], v[0][1]], [v[1][0], v[1][1]], [v[2][0], v[2][1]]];
    if polygon_area(&t) < 0.0 {
        t.swap(1, 2);
    }
    t
}

fn triangle_intersection_area(s1: &Simplex, s2: &Simplex) -> f64 {
    let subject = triangle_ccw(s1);
    let clip = triangle_ccw(s2);
    let mut poly: Vec<P2> = subject.to_vec();
    for i in 0..3 {
        poly = clip_halfplane(&poly, clip[i], clip[(i + 1) % 3]);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    polygon_area(&poly).max(0.0)
}

/// Volume of S1 ∩ S2.
///
/// Exact for K = 1 (interval overlap) and K = 2 (Sutherland-Hodgman clipping
/// of S1 against S2's half-planes, then the shoelace area). For K >= 3 use
/// `Mc`: uniform samples from the smaller simplex, fraction landing in the
/// other, times the smaller volume; the standard error is binomial.
pub fn intersection_volume(
    s1: &Simplex,
    s2: &Simplex,
    mode: MeasureMode,
    budget: usize,
    stream: RngStream,
) -> Result<ValueWithSe> {
    check_same_dim(s1, s2)?;
    match (mode, s1.dim()) {
        (MeasureMode::Exact, 1) => {
            let (a1, b1) = interval_bounds(s1);
            let (a2, b2) = interval_bounds(s2);
            let overlap = (b1.min(b2) - a1.max(a2)).max(0.0);
            Ok(ValueWithSe {
                value: overlap,
                std_error: 0.0,
            })
        }
        (MeasureMode::Exact, 2) => Ok(ValueWithSe {
            value: triangle_intersection_area(s1, s2),
            std_error: 0.0,
        }),
        (MeasureMode::Exact, dim) => Err(Error::UnsupportedExact { dim }),
        (MeasureMode::Mc, _) => {
            if budget < 1 {
                return Err(Error::Parameter("mc budget must be >= 1".into()));
            }
            let (small, other) = if s1.volume() <= s2.volume() {
                (s1, s2)
            } else {
                (s2, s1)
            };
            let pts = sample_uniform_simplex(small, budget, stream);
            let hits = pts.iter().filter(|p| other.contains(p, 0.0)).count();
            let p = hits as f64 / budget as f64;
            Ok(ValueWithSe {
                value: p * small.volume(),
                std_error: small.volume() * (p * (1.0 - p) / budget as f64).sqrt(),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// TV distances
// ---------------------------------------------------------------------------

/// TV between the uniform measures on two simplices:
/// `1 - I / max(Vol1, Vol2)`. Symmetric in its arguments.
pub fn tv_uniform(
    s1: &Simplex,
    s2: &Simplex,
    mode: MeasureMode,
    budget: usize,
    stream: RngStream,
) -> Result<TvEstimate> {
    let inter = intersection_volume(s1, s2, mode, budget, stream)?;
    let vmax = s1.volume().max(s2.volume());
    let value = (1.0 - inter.value / vmax).clamp(0.0, 1.0);
    Ok(match mode {
        MeasureMode::Exact => TvEstimate::exact(value),
        MeasureMode::Mc => TvEstimate {
            value,
            std_error: inter.std_error / vmax,
            method: TvMethod::Mc,
            budgets: vec![budget],
        },
    })
}

/// Nested Monte Carlo estimate of TV(G_S, P_S), the gap between the
/// Gaussian-corrupted simplex law and the clean uniform one:
///
///   TV = E_{x~P_S} [ (1 - Vol(S)·g(x))_+ ] = E_{x~P_S} [ 1 - q(x) ],
///
/// where g is the σ-smoothed density and Vol(S)·g(x) = q(x) is the
/// probability that a Gaussian centered at x lands inside S. The inner loop
/// estimates q(x) by sampling z ~ N(0, σ²I) and counting membership of
/// x + z, which stays stable for arbitrarily small σ (a kernel average over
/// uniform inner draws would underflow once σ is below the inner sample
/// spacing). The reported standard error covers the outer loop only; the
/// inner estimate is unbiased and its noise is folded into the outer spread.
pub fn tv_noisy_vs_clean_mc(
    s: &Simplex,
    sigma: f64,
    outer_budget: usize,
    inner_budget: usize,
    stream: RngStream,
) -> Result<TvEstimate> {
    if sigma < 0.0 {
        return Err(Error::Parameter(format!("sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        // Identical distributions.
        return Ok(TvEstimate::exact(0.0));
    }
    if outer_budget < 1_000 || inner_budget < 1_000 {
        return Err(Error::Parameter(format!(
            "nested-mc budgets must be >= 1000, got outer {outer_budget}, inner {inner_budget}"
        )));
    }
    let k = s.dim();
    let outer = sample_uniform_simplex(s, outer_budget, stream.substream(1));
    let mut inner_rng = stream.substream(2).rng();
    let mut shifted = vec![0.0f64; k];
    let mut stats = Vec::with_capacity(outer_budget);
    for x in &outer {
        let mut hits = 0usize;
        for _ in 0..inner_budget {
            for (dst, &xi) in shifted.iter_mut().zip(x) {
                let z: f64 = inner_rng.sample(rand_distr::StandardNormal);
                *dst = xi + sigma * z;
            }
            if s.contains(&shifted, 0.0) {
                hits += 1;
            }
        }
        let q_hat = hits as f64 / inner_budget as f64;
        stats.push((1.0 - q_hat).max(0.0));
    }
    let n = stats.len() as f64;
    let mean = stats.iter().sum::<f64>() / n;
    let var = stats.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0);
    Ok(TvEstimate {
        value: mean.clamp(0.0, 1.0),
        std_error: (var / n).sqrt(),
        method: TvMethod::NestedMc,
        budgets: vec![outer_budget, inner_budget],
    })
}

/// Noise-gap bound: 3(K+1)·θ̄/SNR · sqrt(K + sqrt(8K·ln(SNR/(K+1)))).
///
/// Requires SNR > K+1 so the log argument exceeds 1.
pub fn lemma3_bound(dim: usize, theta_upper: f64, snr: f64) -> Result<f64> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    if !(theta_upper > 0.0) {
        return Err(Error::Parameter(format!(
            "theta_upper must be > 0, got {theta_upper}"
        )));
    }
    let k = dim as f64;
    if !(snr > k + 1.0) {
        return Err(Error::OutOfRegime {
            snr,
            min_snr: k + 1.0,
        });
    }
    let inner = (8.0 * k * (snr / (k + 1.0)).ln()).sqrt();
    Ok(3.0 * (k + 1.0) * theta_upper / snr * (k + inner).sqrt())
}

// ---------------------------------------------------------------------------
// Sample-complexity calculators
// ---------------------------------------------------------------------------

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Parameter(format!("{name} must be in (0,1), got {v}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Parameter(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Sample count for selection inside a ball of radius R:
/// ⌈(2K(K+1)·ln(1 + (10θ̄(K+1)/ε2)·(R/Vol^(1/K))) + ln(3/δ)) / ε2²⌉.
pub fn sample_complexity_thm2(
    dim: usize,
    theta_upper: f64,
    radius: f64,
    vol_root: f64,
    eps2: f64,
    delta: f64,
) -> Result<u64> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    check_positive("theta_upper", theta_upper)?;
    check_positive("radius", radius)?;
    check_positive("vol_root", vol_root)?;
    check_unit_interval("eps2", eps2)?;
    check_unit_interval("delta", delta)?;
    let k = dim as f64;
    let log_term = (1.0 + (10.0 * theta_upper * (k + 1.0) / eps2) * (radius / vol_root)).ln();
    let n = (2.0 * k * (k + 1.0) * log_term + (3.0 / delta).ln()) / (eps2 * eps2);
    Ok(n.ceil() as u64)
}

/// End-to-end sample count (ball construction plus selection):
/// ⌈(K(K+1)·ln(1 + (10θ̄(K+1)/ε2)·(R/Vol^(1/K))) + ln(6/δ)) / ε2²
///   + 144·θ̲⁴·e⁴·((K+1)(K+2)/K)²·ln(12/δ)⌉.
pub fn sample_complexity_thm3(
    dim: usize,
    theta_lower: f64,
    theta_upper: f64,
    radius: f64,
    vol_root: f64,
    eps2: f64,
    delta: f64,
) -> Result<u64> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    check_positive("theta_lower", theta_lower)?;
    check_positive("theta_upper", theta_upper)?;
    check_positive("radius", radius)?;
    check_positive("vol_root", vol_root)?;
    check_unit_interval("eps2", eps2)?;
    check_unit_interval("delta", delta)?;
    let k = dim as f64;
    let log_term = (1.0 + (10.0 * theta_upper * (k + 1.0) / eps2) * (radius / vol_root)).ln();
    let first = (k * (k + 1.0) * log_term + (6.0 / delta).ln()) / (eps2 * eps2);
    let second = thm3_second_summand(dim, theta_lower, delta)?;
    Ok((first + second).ceil() as u64)
}

/// The ball-construction summand 144·θ̲⁴·e⁴·((K+1)(K+2)/K)²·ln(12/δ);
/// counts total samples, i.e. twice the pair threshold.
pub fn thm3_second_summand(dim: usize, theta_lower: f64, delta: f64) -> Result<f64> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    check_positive("theta_lower", theta_lower)?;
    check_unit_interval("delta", delta)?;
    let k = dim as f64;
    let e4 = std::f64::consts::E.powi(4);
    let shape = (k + 1.0) * (k + 2.0) / k;
    Ok(144.0 * theta_lower.powi(4) * e4 * shape * shape * (12.0 / delta).ln())
}

/// Closed-form cap on the bounding-ball radius in units of Vol^(1/K):
/// 2e·θ̲²·(K+2)·sqrt((K+1)(K+2))·(1 + 1/(θ̲·SNR)) / sqrt(denom), with the
/// same denominator as the radius formula. Multiply by `vol_root` to get an
/// absolute radius.
pub fn lemma1_radius_cap_ratio(dim: usize, theta_lower: f64, snr: f64) -> Result<f64> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    check_positive("theta_lower", theta_lower)?;
    check_positive("snr", snr)?;
    let k = dim as f64;
    let e = std::f64::consts::E;
    let e2 = e * e;
    let denominator = 1.0 + 4.0 * e2 * (k - 2.0) / (snr * snr) - 4.0 / (theta_lower * snr);
    if denominator <= 0.0 {
        return Err(Error::SnrTooLow {
            denominator,
            critical_snr: crate::bounding::critical_snr(dim, theta_lower),
            dim,
            theta_lower,
        });
    }
    let num = 2.0
        * e
        * theta_lower.powi(2)
        * (k + 2.0)
        * ((k + 1.0) * (k + 2.0)).sqrt()
        * (1.0 + 1.0 / (theta_lower * snr));
    Ok(num / denominator.sqrt())
}
