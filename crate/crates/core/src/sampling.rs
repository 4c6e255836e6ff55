//! Dataset generation: uniform draws on a simplex, additive Gaussian noise,
//! and the deterministic half split used by the pipeline.
//!
//! Generators take an explicit [`RngStream`] value and are pure given the
//! stream; there is no global RNG. Noise covariance is σ²·I.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::simplex::Simplex;

/// Stream tags for the two phases of dataset generation.
pub const STREAM_UNIFORM: u64 = 0x5A4D_0001;
pub const STREAM_NOISE: u64 = 0x5A4D_0002;

/// An i.i.d. sample set y_i = V φ_i + z_i with seed provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoisyDataset {
    pub dim: usize,
    pub sigma: f64,
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
    /// Reference simplex, present in experiment mode only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truth: Option<Simplex>,
}

impl NoisyDataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draw `n` i.i.d. uniform points from `s`: φ from normalized unit-rate
/// exponentials (Dirichlet(1,...,1)), then x = V_S φ.
pub fn sample_uniform_simplex(s: &Simplex, n: usize, stream: RngStream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    let k = s.dim();
    let mut out = Vec::with_capacity(n);
    let mut weights = vec![0.0f64; k + 1];
    for _ in 0..n {
        let mut total = 0.0;
        for w in weights.iter_mut() {
            let e: f64 = rng.sample(Exp1);
            *w = e;
            total += e;
        }
        let mut x = vec![0.0; k];
        for (w, v) in weights.iter().zip(s.vertices()) {
            let w = w / total;
            for d in 0..k {
                x[d] += w * v[d];
            }
        }
        out.push(x);
    }
    out
}

/// Add i.i.d. N(0, σ²I) noise to each point. σ = 0 returns the input
/// unchanged (bitwise) without consuming the stream.
pub fn add_gaussian_noise(points: &[Vec<f64>], sigma: f64, stream: RngStream) -> Vec<Vec<f64>> {
    if sigma == 0.0 {
        return points.to_vec();
    }
    let mut rng = stream.rng();
    points
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect()
}

/// Generate a full noisy dataset from the reference simplex, recording seed
/// and truth. Uniform draws and noise use fixed substreams of `master_seed`.
pub fn generate(s: &Simplex, n: usize, sigma: f64, master_seed: u64) -> NoisyDataset {
    let root = RngStream::root(master_seed);
    let clean = sample_uniform_simplex(s, n, root.substream(STREAM_UNIFORM));
    let points = add_gaussian_noise(&clean, sigma, root.substream(STREAM_NOISE));
    NoisyDataset {
        dim: s.dim(),
        sigma,
        seed: master_seed,
        points,
        truth: Some(s.clone()),
    }
}

/// Deterministic order-preserving split: first ⌈n/2⌉ points, then the rest.
pub fn split_half(d: &NoisyDataset) -> Result<(NoisyDataset, NoisyDataset)> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let cut = n.div_ceil(2);
    let mk = |points: Vec<Vec<f64>>| NoisyDataset {
        dim: d.dim,
        sigma: d.sigma,
        seed: d.seed,
        points,
        truth: d.truth.clone(),
    };
    Ok((
        mk(d.points[..cut].to_vec()),
        mk(d.points[cut..].to_vec()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::IsoperimetryParams;

    fn interval(a: f64, b: f64) -> Simplex {
        Simplex::new(vec![vec![a], vec![b]]).unwrap()
    }

    fn standard_triangle() -> Simplex {
        Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn zero_samples_is_empty() {
        let s = interval(0.0, 1.0);
        assert!(sample_uniform_simplex(&s, 0, RngStream::root(1)).is_empty());
    }

    #[test]
    fn samples_stay_inside_support() {
        let s = standard_triangle();
        for x in sample_uniform_simplex(&s, 10_000, RngStream::root(2)) {
            assert!(s.contains(&x, 1e-9));
        }
    }

    #[test]
    fn sample_mean_approaches_centroid() {
        let s = standard_triangle();
        let n = 20_000;
        let pts = sample_uniform_simplex(&s, n, RngStream::root(3));
        let c = s.centroid();
        let tol = 4.0 * s.diameter() / (n as f64).sqrt();
        for d in 0..2 {
            let mean = pts.iter().map(|p| p[d]).sum::<f64>() / n as f64;
            assert!((mean - c[d]).abs() <= tol, "coord {d}: {mean} vs {}", c[d]);
        }
    }

    #[test]
    fn zero_sigma_is_identity() {
        let pts = sample_uniform_simplex(&interval(0.0, 1.0), 100, RngStream::root(4));
        let noisy = add_gaussian_noise(&pts, 0.0, RngStream::root(5));
        assert_eq!(pts, noisy);
    }

    #[test]
    fn noise_moments() {
        let n = 100_000;
        let pts = vec![vec![0.0]; n];
        let noisy = add_gaussian_noise(&pts, 0.3, RngStream::root(6));
        let mean = noisy.iter().map(|p| p[0]).sum::<f64>() / n as f64;
        assert!(mean.abs() <= 4.0 * 0.3 / (n as f64).sqrt(), "mean {mean}");
        let var = noisy.iter().map(|p| p[0] * p[0]).sum::<f64>() / n as f64 - mean * mean;
        assert!((var - 0.09).abs() <= 0.05 * 0.09, "var {var}");
    }

    #[test]
    fn split_sizes_and_order() {
        let mk = |n: usize| NoisyDataset {
            dim: 1,
            sigma: 0.0,
            seed: 0,
            points: (0..n).map(|i| vec![i as f64]).collect(),
            truth: None,
        };
        let (a, b) = split_half(&mk(4)).unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        let (a, b) = split_half(&mk(5)).unwrap();
        assert_eq!((a.len(), b.len()), (3, 2));
        let mut joined = a.points.clone();
        joined.extend(b.points.clone());
        assert_eq!(joined, mk(5).points);
        assert!(matches!(
            split_half(&mk(1)),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn generation_is_deterministic() {
        let s = standard_triangle();
        let a = generate(&s, 500, 0.1, 99);
        let b = generate(&s, 500, 0.1, 99);
        assert_eq!(a.points, b.points);
        let c = generate(&s, 500, 0.1, 100);
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn uniformity_ks_on_unit_interval() {
        // KS statistic of 1e4 draws against the uniform CDF stays below the
        // 1% critical value (~1.63/sqrt(n)) in at least 95 of 100 trials.
        let s = interval(0.0, 1.0);
        let n = 10_000usize;
        let crit = 1.63 / (n as f64).sqrt();
        let mut ok = 0;
        for seed in 0..100u64 {
            let mut xs: Vec<f64> = sample_uniform_simplex(&s, n, RngStream::new(seed, 77))
                .into_iter()
                .map(|p| p[0])
                .collect();
            xs.sort_by(f64::total_cmp);
            let mut ks = 0.0f64;
            for (i, x) in xs.iter().enumerate() {
                let hi = (i + 1) as f64 / n as f64 - x;
                let lo = x - i as f64 / n as f64;
                ks = ks.max(hi.max(lo));
            }
            if ks < crit {
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok}/100 trials under the critical value");
    }

    #[test]
    fn random_simplex_samples_roundtrip_dims() {
        let params = IsoperimetryParams::new(5.0, 5.0).unwrap();
        let mut rng = RngStream::root(8).rng();
        let s = crate::simplex::random_simplex(4, &params, 1.0, &mut rng).unwrap();
        let pts = sample_uniform_simplex(&s, 64, RngStream::root(9));
        assert!(pts.iter().all(|p| p.len() == 4));
    }
}
