//! Exact geometry of K-simplices: construction, volume, facet measures,
//! diameter, isoperimetry checks, membership, and density evaluation.
//!
//! All operations are pure functions of immutable values. A [`Simplex`] is
//! validated at construction (affine independence / positive volume) and
//! caches its volume, diameter, and the inverse edge matrix used by the
//! barycentric solver.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative determinant threshold below which a vertex set is treated as
/// rank-deficient: |det| / diameter^K < this.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Default membership tolerance, relative to the simplex diameter.
pub const DEFAULT_MEMBERSHIP_TOL_REL: f64 = 1e-9;

/// Attempt cap for rejection sampling in [`random_simplex`].
pub const RANDOM_SIMPLEX_ATTEMPTS: usize = 10_000;

/// A K-simplex in R^K given by K+1 affinely independent vertices.
///
/// Serialized form is `{"dim": K, "vertices": [[..K floats..] x (K+1)]}`;
/// derived quantities are recomputed on deserialization, which re-validates
/// the vertex set.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawSimplex", into = "RawSimplex")]
pub struct Simplex {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    #[serde(skip)]
    volume: f64,
    #[serde(skip)]
    diameter: f64,
    #[serde(skip)]
    edge_inv: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSimplex {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<RawSimplex> for Simplex {
    type Error = Error;
    fn try_from(raw: RawSimplex) -> Result<Self> {
        if raw.vertices.len() != raw.dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: raw.dim + 1,
                got: raw.vertices.len(),
            });
        }
        Simplex::new(raw.vertices)
    }
}

impl From<Simplex> for RawSimplex {
    fn from(s: Simplex) -> Self {
        RawSimplex {
            dim: s.dim,
            vertices: s.vertices,
        }
    }
}

impl PartialEq for Simplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl Simplex {
    /// Build and validate a simplex from K+1 vertices in R^K.
    ///
    /// Rejects rank-deficient vertex sets (relative determinant below
    /// [`DEGENERACY_THRESHOLD`]).
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: vertices.len(),
            });
        }
        let dim = vertices.len() - 1;
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parameter("non-finite vertex coordinate".into()));
            }
        }

        let mut diameter = 0.0f64;
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                diameter = diameter.max(dist(&vertices[i], &vertices[j]));
            }
        }

        // Edge matrix [v1-v0 | ... | vK-v0], column-major.
        let edge = DMatrix::from_fn(dim, dim, |r, c| vertices[c + 1][r] - vertices[0][r]);
        let det = edge.clone().lu().determinant();
        let det_ratio = if diameter > 0.0 {
            det.abs() / diameter.powi(dim as i32)
        } else {
            0.0
        };
        if det_ratio < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateSimplex {
                det_ratio,
                threshold: DEGENERACY_THRESHOLD,
            });
        }
        let edge_inv = edge
            .try_inverse()
            .ok_or(Error::DegenerateSimplex {
                det_ratio,
                threshold: DEGENERACY_THRESHOLD,
            })?;
        Ok(Self {
            dim,
            vertices,
            volume: det.abs() / factorial(dim),
            diameter,
            edge_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Lebesgue volume |det V̂| / K!.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Unit-volume root Vol^(1/K).
    pub fn vol_root(&self) -> f64 {
        self.volume.powf(1.0 / self.dim as f64)
    }

    /// Length of the longest segment inside the simplex; attained between
    /// vertices since the maximum of a convex function over a polytope is at
    /// an extreme point.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Vertex centroid (mean of the K+1 vertices).
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let n = self.vertices.len() as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }

    /// (K-1)-dimensional measures of the K+1 facets; entry i is opposite
    /// vertex i, computed from the Gram determinant of the facet's edge
    /// matrix. For K = 1 each facet is a point and its 0-dimensional measure
    /// is 1 by convention, which keeps the isoperimetry inequality meaningful.
    pub fn facet_volumes(&self) -> Vec<f64> {
        if self.dim == 1 {
            return vec![1.0, 1.0];
        }
        let k = self.dim;
        (0..=k)
            .map(|skip| {
                let facet: Vec<&Vec<f64>> = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| v)
                    .collect();
                // W = [w1-w0 | ... | w_{K-1}-w0], measure = sqrt(det(W^T W)) / (K-1)!
                let w = DMatrix::from_fn(k, k - 1, |r, c| facet[c + 1][r] - facet[0][r]);
                let gram = w.transpose() * &w;
                let g = gram.determinant().max(0.0);
                g.sqrt() / factorial(k - 1)
            })
            .collect()
    }

    /// Largest facet measure A_max.
    pub fn max_facet_volume(&self) -> f64 {
        self.facet_volumes()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Barycentric coordinates of `x`: the unique φ with Σφ = 1 and
    /// V_S φ = x.
    pub fn barycentric(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let rhs = DVector::from_fn(self.dim, |r, _| x[r] - self.vertices[0][r]);
        let lam = &self.edge_inv * rhs;
        let mut phi = Vec::with_capacity(self.dim + 1);
        phi.push(1.0 - lam.iter().sum::<f64>());
        phi.extend(lam.iter().copied());
        Ok(phi)
    }

    /// Membership test: all barycentric coordinates >= -tol.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self.barycentric(x) {
            Ok(phi) => phi.iter().all(|&p| p >= -tol),
            Err(_) => false,
        }
    }

    /// Membership with the default tolerance (1e-9 relative to diameter).
    pub fn contains_default(&self, x: &[f64]) -> bool {
        self.contains(x, DEFAULT_MEMBERSHIP_TOL_REL * self.diameter)
    }

    /// Uniform density: 1/Vol inside (exact membership), 0 outside.
    pub fn density_at(&self, x: &[f64]) -> f64 {
        if self.contains(x, 0.0) {
            1.0 / self.volume
        } else {
            0.0
        }
    }

    /// Axis-aligned bounding box as (mins, maxs).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for d in 0..self.dim {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        (lo, hi)
    }
}

/// Shape-regularity parameters (θ̲, θ̄); both strictly positive and finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetryParams {
    pub theta_lower: f64,
    pub theta_upper: f64,
}

impl IsoperimetryParams {
    pub fn new(theta_lower: f64, theta_upper: f64) -> Result<Self> {
        if !(theta_lower > 0.0 && theta_lower.is_finite()) {
            return Err(Error::Parameter(format!(
                "theta_lower must be positive and finite, got {theta_lower}"
            )));
        }
        if !(theta_upper > 0.0 && theta_upper.is_finite()) {
            return Err(Error::Parameter(format!(
                "theta_upper must be positive and finite, got {theta_upper}"
            )));
        }
        Ok(Self {
            theta_lower,
            theta_upper,
        })
    }

    /// Same shape constraints relaxed by a slack factor > 0.
    pub fn relaxed(&self, slack: f64) -> Self {
        Self {
            theta_lower: self.theta_lower * slack,
            theta_upper: self.theta_upper * slack,
        }
    }
}

/// Outcome of the isoperimetry check with the two slack ratios (lhs/rhs);
/// a ratio <= 1 means the inequality holds. Non-strict comparison.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IsoperimetryReport {
    pub is_isoperimetric: bool,
    /// A_max / (θ̄ · Vol^((K-1)/K))
    pub facet_ratio: f64,
    /// L_max / (θ̲ · K · Vol^(1/K))
    pub diameter_ratio: f64,
}

/// Check A_max <= θ̄·Vol^((K-1)/K) and L_max <= θ̲·K·Vol^(1/K).
pub fn is_isoperimetric(s: &Simplex, p: &IsoperimetryParams) -> IsoperimetryReport {
    let k = s.dim() as f64;
    let facet_ratio = s.max_facet_volume() / (p.theta_upper * s.volume().powf((k - 1.0) / k));
    let diameter_ratio = s.diameter() / (p.theta_lower * k * s.volume().powf(1.0 / k));
    IsoperimetryReport {
        is_isoperimetric: facet_ratio <= 1.0 && diameter_ratio <= 1.0,
        facet_ratio,
        diameter_ratio,
    }
}

/// Draw a point uniformly from the ball of radius `radius` around `center`:
/// Gaussian direction, radius scaled by U^(1/K).
pub(crate) fn uniform_in_ball<R: Rng>(center: &[f64], radius: f64, rng: &mut R) -> Vec<f64> {
    let k = center.len();
    loop {
        let dir: Vec<f64> = (0..k)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let u: f64 = rng.gen::<f64>();
        let r = radius * u.powf(1.0 / k as f64);
        return center
            .iter()
            .zip(&dir)
            .map(|(c, d)| c + r * d / norm)
            .collect();
    }
}

/// Rejection-sample a simplex with vertices in the ball of radius `scale`
/// (centered at the origin) until it passes the isoperimetry check.
pub fn random_simplex<R: Rng>(
    dim: usize,
    params: &IsoperimetryParams,
    scale: f64,
    rng: &mut R,
) -> Result<Simplex> {
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::Parameter(format!("scale must be > 0, got {scale}")));
    }
    let center = vec![0.0; dim];
    for _ in 0..RANDOM_SIMPLEX_ATTEMPTS {
        let vertices: Vec<Vec<f64>> = (0..=dim)
            .map(|_| uniform_in_ball(&center, scale, rng))
            .collect();
        let Ok(s) = Simplex::new(vertices) else {
            continue;
        };
        if is_isoperimetric(&s, params).is_isoperimetric {
            return Ok(s);
        }
    }
    Err(Error::InfeasibleParams {
        attempts: RANDOM_SIMPLEX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    fn standard_triangle() -> Simplex {
        Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn interval(a: f64, b: f64) -> Simplex {
        Simplex::new(vec![vec![a], vec![b]]).unwrap()
    }

    #[test]
    fn triangle_volume_is_half() {
        assert_eq!(standard_triangle().volume(), 0.5);
    }

    #[test]
    fn unit_interval_volume() {
        assert_eq!(interval(0.0, 1.0).volume(), 1.0);
    }

    #[test]
    fn scaled_triangle_volume() {
        // Hand determinant: |det [[2,0],[0,2]]| / 2! = 2.
        let s = Simplex::new(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!((s.volume() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_vertices_rejected() {
        let r = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(r, Err(Error::DegenerateSimplex { .. })));
        let r = Simplex::new(vec![vec![1.0], vec![1.0]]);
        assert!(matches!(r, Err(Error::DegenerateSimplex { .. })));
    }

    #[test]
    fn triangle_facets_are_edge_lengths() {
        let f = standard_triangle().facet_volumes();
        // Facet opposite v0 is the hypotenuse.
        assert!((f[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((f[1] - 1.0).abs() < 1e-15);
        assert!((f[2] - 1.0).abs() < 1e-15);
        assert!((standard_triangle().max_facet_volume() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn interval_facets_use_counting_measure() {
        assert_eq!(interval(0.0, 3.0).facet_volumes(), vec![1.0, 1.0]);
    }

    #[test]
    fn regular_tetrahedron_facet_areas() {
        // Unit-edge regular tetrahedron; every facet is an equilateral
        // triangle of area sqrt(3)/4 ~ 0.4330127. Gram-determinant hand
        // computation for a unit-edge facet: W^T W = [[1, 1/2], [1/2, 1]],
        // det = 3/4, sqrt(3/4)/2! = sqrt(3)/4.
        let h = (0.125f64).sqrt();
        let s = Simplex::new(vec![
            vec![0.5, 0.0, -h],
            vec![-0.5, 0.0, -h],
            vec![0.0, 0.5, h],
            vec![0.0, -0.5, h],
        ])
        .unwrap();
        assert!((s.diameter() - 1.0).abs() < 1e-15);
        let expected = 3f64.sqrt() / 4.0;
        for f in s.facet_volumes() {
            assert!((f - 0.4330127).abs() < 1e-6, "facet {f}");
            assert!((f - expected).abs() < 1e-12, "facet {f} vs {expected}");
        }
    }

    #[test]
    fn diameter_examples() {
        assert!((standard_triangle().diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(interval(0.0, 3.0).diameter(), 3.0);
    }

    #[test]
    fn diameter_matches_brute_force_on_random_simplices() {
        let mut rng = RngStream::new(7, 1).rng();
        let params = IsoperimetryParams::new(5.0, 5.0).unwrap();
        for _ in 0..100 {
            let s = random_simplex(3, &params, 2.0, &mut rng).unwrap();
            let mut best = 0.0f64;
            for i in 0..s.vertices().len() {
                for j in 0..s.vertices().len() {
                    best = best.max(dist(&s.vertices()[i], &s.vertices()[j]));
                }
            }
            assert_eq!(s.diameter(), best);
        }
    }

    #[test]
    fn isoperimetry_examples() {
        let s = standard_triangle();
        // A_max = sqrt(2) = 2 * 0.5^(1/2); L_max = sqrt(2) = 1 * 2 * 0.5^(1/2).
        let p = IsoperimetryParams::new(1.0, 2.0).unwrap();
        let rep = is_isoperimetric(&s, &p);
        assert!(rep.is_isoperimetric);
        assert!((rep.facet_ratio - 1.0).abs() < 1e-12);
        assert!((rep.diameter_ratio - 1.0).abs() < 1e-12);

        let p = IsoperimetryParams::new(1.0, 1.9).unwrap();
        assert!(!is_isoperimetric(&s, &p).is_isoperimetric);

        let huge = IsoperimetryParams::new(1e6, 1e6).unwrap();
        assert!(is_isoperimetric(&s, &huge).is_isoperimetric);
    }

    #[test]
    fn barycentric_examples() {
        let s = standard_triangle();
        let phi = s.barycentric(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for p in &phi {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let phi = s.barycentric(&[0.0, 0.0]).unwrap();
        assert!((phi[0] - 1.0).abs() < 1e-15);
        assert!(phi[1].abs() < 1e-15 && phi[2].abs() < 1e-15);
    }

    #[test]
    fn barycentric_reconstruction_roundtrip() {
        let mut rng = RngStream::new(11, 0).rng();
        let params = IsoperimetryParams::new(4.0, 4.0).unwrap();
        let s = random_simplex(3, &params, 1.5, &mut rng).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let phi = s.barycentric(&x).unwrap();
            assert!((phi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let mut recon = vec![0.0; 3];
            for (w, v) in phi.iter().zip(s.vertices()) {
                for d in 0..3 {
                    recon[d] += w * v[d];
                }
            }
            assert!(dist(&recon, &x) <= 1e-10);
        }
    }

    #[test]
    fn contains_examples() {
        let s = standard_triangle();
        assert!(s.contains(&[0.25, 0.25], 0.0));
        assert!(!s.contains(&[1.0, 1.0], 0.0));
        // Boundary point with barycentric (0, 1/2, 1/2).
        assert!(s.contains(&[0.5, 0.5], 1e-12));
    }

    #[test]
    fn density_examples() {
        let s = standard_triangle();
        assert_eq!(s.density_at(&[0.25, 0.25]), 2.0);
        assert_eq!(s.density_at(&[5.0, 5.0]), 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        // MC average of density over the bounding box times box volume.
        let s = standard_triangle();
        let (lo, hi) = s.bounding_box();
        let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let n = 200_000;
        let mut rng = RngStream::new(3, 5).rng();
        let mut hits = 0u64;
        for _ in 0..n {
            let x: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| rng.gen_range(*a..*b))
                .collect();
            if s.density_at(&x) > 0.0 {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        let integral = p * box_vol * (1.0 / s.volume());
        let se = box_vol / s.volume() * (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (integral - 1.0).abs() <= 3.0 * se,
            "integral {integral} se {se}"
        );
    }

    #[test]
    fn random_simplex_k1_succeeds_with_theta_one() {
        // At K=1 every interval satisfies L_max = Vol, so theta >= 1 works.
        let params = IsoperimetryParams::new(1.0, 1.0).unwrap();
        let mut rng = RngStream::new(1, 1).rng();
        let s = random_simplex(1, &params, 3.0, &mut rng).unwrap();
        assert!(is_isoperimetric(&s, &params).is_isoperimetric);
    }

    #[test]
    fn random_simplex_infeasible_params_error() {
        let params = IsoperimetryParams::new(1e-6, 1e-6).unwrap();
        let mut rng = RngStream::new(1, 2).rng();
        assert!(matches!(
            random_simplex(2, &params, 1.0, &mut rng),
            Err(Error::InfeasibleParams { .. })
        ));
    }

    #[test]
    fn random_simplex_output_passes_check() {
        let params = IsoperimetryParams::new(2.0, 3.0).unwrap();
        let mut rng = RngStream::new(8, 4).rng();
        for _ in 0..20 {
            let s = random_simplex(2, &params, 1.0, &mut rng).unwrap();
            assert!(is_isoperimetric(&s, &params).is_isoperimetric);
        }
    }

    #[test]
    fn simplex_json_roundtrip() {
        let s = standard_triangle();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"dim\":2"));
        let back: Simplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.volume(), s.volume());
    }

    proptest! {
        #[test]
        fn scale_equivariance(seed in 0u64..1000, c in 0.1f64..4.0) {
            let mut rng = RngStream::new(seed, 90).rng();
            let params = IsoperimetryParams::new(6.0, 6.0).unwrap();
            let dim = 1 + (seed % 3) as usize;
            let s = random_simplex(dim, &params, 1.0, &mut rng).unwrap();
            let scaled = Simplex::new(
                s.vertices()
                    .iter()
                    .map(|v| v.iter().map(|x| c * x).collect())
                    .collect(),
            )
            .unwrap();
            let expect_vol = c.powi(dim as i32) * s.volume();
            prop_assert!((scaled.volume() - expect_vol).abs() <= 1e-9 * expect_vol.abs());
            prop_assert!((scaled.diameter() - c * s.diameter()).abs() <= 1e-9 * s.diameter());
        }

        #[test]
        fn vertex_permutation_invariance(seed in 0u64..1000) {
            let mut rng = RngStream::new(seed, 91).rng();
            let params = IsoperimetryParams::new(6.0, 6.0).unwrap();
            let s = random_simplex(2, &params, 1.0, &mut rng).unwrap();
            let mut verts = s.vertices().to_vec();
            verts.rotate_left(1);
            let t = Simplex::new(verts).unwrap();
            prop_assert!((s.volume() - t.volume()).abs() < 1e-12);
            prop_assert!((s.diameter() - t.diameter()).abs() < 1e-12);
            let mut fs = s.facet_volumes();
            let mut ft = t.facet_volumes();
            fs.sort_by(f64::total_cmp);
            ft.sort_by(f64::total_cmp);
            for (a, b) in fs.iter().zip(&ft) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let x = [0.3, 0.3];
            prop_assert_eq!(s.contains(&x, 1e-12), t.contains(&x, 1e-12));
        }

        #[test]
        fn contains_every_convex_combination(seed in 0u64..500) {
            let mut rng = RngStream::new(seed, 92).rng();
            let params = IsoperimetryParams::new(6.0, 6.0).unwrap();
            let s = random_simplex(3, &params, 1.0, &mut rng).unwrap();
            // Sample phi on the standard simplex via exponentials.
            let e: Vec<f64> = (0..4)
                .map(|_| -rng.gen::<f64>().max(1e-300).ln())
                .collect();
            let tot: f64 = e.iter().sum();
            let mut x = vec![0.0; 3];
            for (w, v) in e.iter().zip(s.vertices()) {
                for d in 0..3 {
                    x[d] += (w / tot) * v[d];
                }
            }
            prop_assert!(s.contains(&x, 1e-9));
        }
    }
}
