//! Stage 2: quantize the bounding ball.
//!
//! A covering set puts points inside the ball so that every ball point is
//! within `eps_cov` of some covering point; every (K+1)-subset of covering
//! points then yields a candidate simplex. With vertex spacing
//! `eps_cov = α·ε/(K+1)` and `α = Vol^(1/K)/(5·θ̄)`, the family is an
//! ε-representative set for all well-shaped simplices inside the ball.
//!
//! Two constructions: `random` draws `(1 + 4R/ε)^(2K)` uniform points (the
//! coupon-collector count), `grid` intersects an axis-aligned lattice of
//! spacing `2ε/√K` with the ball, projecting near-boundary lattice points
//! onto the sphere. Projection onto a convex set is a contraction, so the
//! within-ε guarantee survives the projection and every stored point lies in
//! the closed ball.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounding::BoundingBall;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::simplex::{is_isoperimetric, uniform_in_ball, IsoperimetryParams, Simplex};
use crate::Provenance;

/// Default cap on covering-set size.
pub const DEFAULT_COVERING_CAP: u64 = 10_000_000;
/// Default cap on raw candidate count C(|T|, K+1).
pub const DEFAULT_CANDIDATE_CAP: u64 = 1_000_000;
/// Default slack factor for the relaxed isoperimetry filter.
pub const DEFAULT_ISO_SLACK: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoveringMethod {
    Random,
    Grid,
}

impl std::str::FromStr for CoveringMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(CoveringMethod::Random),
            "grid" => Ok(CoveringMethod::Grid),
            other => Err(Error::Parse(format!(
                "unknown covering method '{other}' (expected grid|random)"
            ))),
        }
    }
}

/// Points inside a ball such that every ball point is within `eps_cov` of one
/// of them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringSet {
    pub ball: BoundingBall,
    pub eps_cov: f64,
    pub method: CoveringMethod,
    pub points: Vec<Vec<f64>>,
}

/// Quantization resolution derived from the target TV ε and the volume-root
/// estimate: α = vol_root/(5θ̄), vertex spacing eps_cov = α·ε/(K+1).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuantizationParams {
    pub eps_rep: f64,
    pub alpha: f64,
    pub vol_root: f64,
    pub vol_source: Provenance,
    pub eps_cov: f64,
}

impl QuantizationParams {
    pub fn new(
        eps_rep: f64,
        vol_root: f64,
        vol_source: Provenance,
        theta_upper: f64,
        dim: usize,
    ) -> Result<Self> {
        if !(eps_rep > 0.0 && eps_rep < 1.0) {
            return Err(Error::Parameter(format!(
                "eps_rep must be in (0,1), got {eps_rep}"
            )));
        }
        if !(vol_root > 0.0 && vol_root.is_finite()) {
            return Err(Error::Parameter(format!(
                "vol_root must be positive and finite, got {vol_root}"
            )));
        }
        if !(theta_upper > 0.0) {
            return Err(Error::Parameter(format!(
                "theta_upper must be > 0, got {theta_upper}"
            )));
        }
        if dim < 1 {
            return Err(Error::Parameter("dim must be >= 1".into()));
        }
        let alpha = vol_root / (5.0 * theta_upper);
        Ok(Self {
            eps_rep,
            alpha,
            vol_root,
            vol_source,
            eps_cov: alpha * eps_rep / (dim as f64 + 1.0),
        })
    }
}

/// Number of uniform draws that make a random set an `eps_cov`-cover with
/// high probability: ⌈(1 + 4R/ε)^(2K)⌉. Errors when the bound exceeds `cap`.
pub fn covering_size_bound(radius: f64, eps_cov: f64, dim: usize, cap: u64) -> Result<u64> {
    if !(radius > 0.0) || !(eps_cov > 0.0) {
        return Err(Error::Parameter(format!(
            "radius and eps_cov must be > 0, got {radius}, {eps_cov}"
        )));
    }
    if dim < 1 {
        return Err(Error::Parameter("dim must be >= 1".into()));
    }
    let bound = (1.0 + 4.0 * radius / eps_cov).powi(2 * dim as i32);
    if !(bound.is_finite()) || bound > cap as f64 {
        return Err(Error::FamilyTooLarge {
            points: bound,
            cap,
            radius,
            eps_cov,
            dim,
        });
    }
    Ok(bound.ceil() as u64)
}

/// Random covering: i.i.d. uniform draws from the ball, count from
/// [`covering_size_bound`].
pub fn random_covering(
    ball: &BoundingBall,
    eps_cov: f64,
    cap: u64,
    stream: RngStream,
) -> Result<CoveringSet> {
    let count = covering_size_bound(ball.radius, eps_cov, ball.dim(), cap)?;
    let mut rng = stream.rng();
    let points = (0..count)
        .map(|_| uniform_in_ball(&ball.center, ball.radius, &mut rng))
        .collect();
    Ok(CoveringSet {
        ball: ball.clone(),
        eps_cov,
        method: CoveringMethod::Random,
        points,
    })
}

/// Deterministic covering: axis-aligned lattice of spacing 2·eps_cov/√K
/// anchored at the ball center, keeping lattice points within R + eps_cov of
/// the center and projecting the outside ones onto the sphere.
///
/// Every ball point is within half a cell diagonal (= eps_cov) of a lattice
/// point, and projecting that lattice point onto the closed ball cannot move
/// it farther from any ball point, so the cover certificate holds by
/// construction. Repeat calls are byte-identical.
pub fn grid_covering(ball: &BoundingBall, eps_cov: f64, cap: u64) -> Result<CoveringSet> {
    if !(eps_cov > 0.0) {
        return Err(Error::Parameter(format!(
            "eps_cov must be > 0, got {eps_cov}"
        )));
    }
    let k = ball.dim();
    let r = ball.radius;
    let h = 2.0 * eps_cov / (k as f64).sqrt();
    let imax = ((r + eps_cov) / h).floor() as i64;
    let per_axis = 2 * imax + 1;
    let lattice_count = (per_axis as f64).powi(k as i32);
    if lattice_count > cap as f64 {
        return Err(Error::FamilyTooLarge {
            points: lattice_count,
            cap,
            radius: r,
            eps_cov,
            dim: k,
        });
    }

    let mut points = Vec::new();
    let mut index = vec![-imax; k];
    'outer: loop {
        let p: Vec<f64> = ball
            .center
            .iter()
            .zip(&index)
            .map(|(c, &i)| c + i as f64 * h)
            .collect();
        let dist = p
            .iter()
            .zip(&ball.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if dist <= r {
            points.push(p);
        } else if dist <= r + eps_cov {
            // Project onto the sphere.
            let scale = r / dist;
            points.push(
                p.iter()
                    .zip(&ball.center)
                    .map(|(a, c)| c + scale * (a - c))
                    .collect(),
            );
        }
        // Advance the multi-index lexicographically (last axis fastest).
        for d in (0..k).rev() {
            index[d] += 1;
            if index[d] <= imax {
                continue 'outer;
            }
            index[d] = -imax;
        }
        break;
    }
    if points.is_empty() {
        // Degenerate only when the ball radius is not positive.
        return Err(Error::Parameter(format!(
            "grid covering produced no points (radius {r}, eps_cov {eps_cov})"
        )));
    }
    Ok(CoveringSet {
        ball: ball.clone(),
        eps_cov,
        method: CoveringMethod::Grid,
        points,
    })
}

/// Statistical verification of the covering property.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverReport {
    pub probes: usize,
    pub max_distance: f64,
    pub eps_cov: f64,
    pub pass: bool,
}

/// Probe the ball uniformly and report the worst nearest-covering-point
/// distance against `eps_cov`.
pub fn verify_cover(cov: &CoveringSet, probes: usize, stream: RngStream) -> Result<CoverReport> {
    if probes < 1 {
        return Err(Error::Parameter("probes must be >= 1".into()));
    }
    let mut rng = stream.rng();
    let mut max_distance = 0.0f64;
    for _ in 0..probes {
        let x = uniform_in_ball(&cov.ball.center, cov.ball.radius, &mut rng);
        let nearest = cov
            .points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        max_distance = max_distance.max(nearest);
    }
    Ok(CoverReport {
        probes,
        max_distance,
        eps_cov: cov.eps_cov,
        pass: max_distance <= cov.eps_cov,
    })
}

/// Filters applied while enumerating candidates.
#[derive(Clone, Debug)]
pub struct CandidateFilters {
    /// Candidates with volume below this are dropped; `None` uses the
    /// default 1e-12·(2R)^K.
    pub volume_floor: Option<f64>,
    /// Optional relaxed isoperimetry filter (params, slack factor).
    pub isoperimetry: Option<(IsoperimetryParams, f64)>,
    pub candidate_cap: u64,
}

impl Default for CandidateFilters {
    fn default() -> Self {
        Self {
            volume_floor: None,
            isoperimetry: None,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

/// Record of what enumeration filtered out.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterRecord {
    pub raw_count: u64,
    pub volume_floor: f64,
    pub dropped_degenerate: u64,
    pub iso_slack: Option<f64>,
    pub dropped_isoperimetry: u64,
}

/// The finite candidate family: covering points plus the surviving
/// (K+1)-tuples in lexicographic index order. Vertex coordinates are
/// resolved on demand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateFamily {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    /// Flat tuple storage, stride dim+1.
    tuples: Vec<u32>,
    pub filters: FilterRecord,
}

impl CandidateFamily {
    pub fn len(&self) -> usize {
        self.tuples.len() / (self.dim + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Covering-point indices of candidate `i`.
    pub fn indices(&self, i: usize) -> &[u32] {
        let stride = self.dim + 1;
        &self.tuples[i * stride..(i + 1) * stride]
    }

    /// Materialize candidate `i` as a simplex.
    pub fn candidate(&self, i: usize) -> Simplex {
        let verts = self
            .indices(i)
            .iter()
            .map(|&ix| self.points[ix as usize].clone())
            .collect();
        Simplex::new(verts).expect("stored candidates pass the degeneracy filter")
    }

    /// Materialize the whole family in order.
    pub fn materialize(&self) -> Vec<Simplex> {
        (0..self.len()).map(|i| self.candidate(i)).collect()
    }

    /// Rank of a tuple of covering-point indices in the family, if present.
    pub fn find_tuple(&self, tuple: &[u32]) -> Option<usize> {
        let stride = self.dim + 1;
        (0..self.len()).find(|&i| &self.tuples[i * stride..(i + 1) * stride] == tuple)
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Enumerate all (K+1)-subsets of covering points in lexicographic order,
/// dropping degenerate and (optionally) badly-shaped candidates.
pub fn enumerate_candidates(cov: &CoveringSet, filters: &CandidateFilters) -> Result<CandidateFamily> {
    let k = cov.ball.dim();
    let stride = k + 1;
    let l = cov.points.len();
    if l < stride {
        return Err(Error::InsufficientData {
            needed: stride,
            got: l,
        });
    }
    let raw = binomial_f64(l, stride);
    if raw > filters.candidate_cap as f64 {
        return Err(Error::TooManyCandidates {
            points: l,
            tuple: stride,
            count: raw,
            cap: filters.candidate_cap,
        });
    }
    let volume_floor = filters
        .volume_floor
        .unwrap_or_else(|| 1e-12 * (2.0 * cov.ball.radius).powi(k as i32));
    let relaxed = filters
        .isoperimetry
        .as_ref()
        .map(|(p, slack)| (p.relaxed(*slack), *slack));

    // Parallel over the first index; each task enumerates its lexicographic
    // sub-range in order, so the flattened result is the full lexicographic
    // order independent of thread count.
    let per_first: Vec<(Vec<u32>, u64, u64)> = (0..l)
        .into_par_iter()
        .map(|first| {
            let mut kept = Vec::new();
            let mut dropped_degenerate = 0u64;
            let mut dropped_iso = 0u64;
            let mut tuple = vec![0u32; stride];
            tuple[0] = first as u32;
            // Initialize remaining positions to the smallest ascending tuple.
            for d in 1..stride {
                tuple[d] = first as u32 + d as u32;
            }
            if (first + stride - 1) >= l {
                return (kept, 0, 0);
            }
            loop {
                let verts: Vec<Vec<f64>> = tuple
                    .iter()
                    .map(|&ix| cov.points[ix as usize].clone())
                    .collect();
                match Simplex::new(verts) {
                    Ok(s) if s.volume() >= volume_floor => {
                        let shape_ok = relaxed
                            .as_ref()
                            .map(|(p, _)| is_isoperimetric(&s, p).is_isoperimetric)
                            .unwrap_or(true);
                        if shape_ok {
                            kept.extend_from_slice(&tuple);
                        } else {
                            dropped_iso += 1;
                        }
                    }
                    Ok(_) => dropped_degenerate += 1,
                    Err(_) => dropped_degenerate += 1,
                }
                // Next combination with fixed first element.
                let mut d = stride - 1;
                loop {
                    if d == 0 {
                        return (kept, dropped_degenerate, dropped_iso);
                    }
                    let max_at_d = (l - (stride - 1 - d)) as u32 - 1;
                    if tuple[d] < max_at_d {
                        tuple[d] += 1;
                        for dd in (d + 1)..stride {
                            tuple[dd] = tuple[dd - 1] + 1;
                        }
                        break;
                    }
                    d -= 1;
                }
            }
        })
        .collect();

    let mut tuples = Vec::new();
    let mut dropped_degenerate = 0;
    let mut dropped_isoperimetry = 0;
    for (kept, deg, iso) in per_first {
        tuples.extend(kept);
        dropped_degenerate += deg;
        dropped_isoperimetry += iso;
    }
    if tuples.is_empty() {
        return Err(Error::EmptyFamily { raw: raw as u64 });
    }
    Ok(CandidateFamily {
        dim: k,
        points: cov.points.clone(),
        tuples,
        filters: FilterRecord {
            raw_count: raw as u64,
            volume_floor,
            dropped_degenerate,
            iso_slack: relaxed.map(|(_, s)| s),
            dropped_isoperimetry,
        },
    })
}

/// Snap each vertex of `s` to its nearest covering point; returns the
/// covering-point indices in the same order as the input vertices and the
/// snapped simplex. Sort a copy of the indices to look the tuple up in a
/// [`CandidateFamily`]. Errors if the snapped vertex set is degenerate.
pub fn snap_vertices(cov: &CoveringSet, s: &Simplex) -> Result<(Vec<u32>, Simplex)> {
    let indices: Vec<u32> = s
        .vertices()
        .iter()
        .map(|v| {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (i, p) in cov.points.iter().enumerate() {
                let d = p
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best as u32
        })
        .collect();
    let verts = indices
        .iter()
        .map(|&i| cov.points[i as usize].clone())
        .collect();
    let snapped = Simplex::new(verts)?;
    Ok((indices, snapped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounding::{BallDiagnostics, BoundingBall};
    use crate::metrics::{tv_uniform, MeasureMode};
    use crate::simplex::random_simplex;

    fn ball(center: Vec<f64>, radius: f64) -> BoundingBall {
        BoundingBall {
            center,
            radius,
            diagnostics: BallDiagnostics {
                d_stat: 0.0,
                pair_count: 0,
                snr_used: 1e12,
                snr_source: Provenance::Config,
                delta_used: 0.1,
                denominator: 1.0,
                denominator_variant: "derivation-chain".into(),
                strict: false,
                heuristic: true,
            },
        }
    }

    #[test]
    fn covering_size_bound_examples() {
        assert_eq!(covering_size_bound(1.0, 1.0, 1, u64::MAX).unwrap(), 25);
        assert_eq!(covering_size_bound(1.0, 2.0, 1, u64::MAX).unwrap(), 9);
        // Monotone: increasing in R, decreasing in eps.
        assert!(
            covering_size_bound(2.0, 1.0, 1, u64::MAX).unwrap()
                > covering_size_bound(1.0, 1.0, 1, u64::MAX).unwrap()
        );
        assert!(matches!(
            covering_size_bound(100.0, 1e-6, 3, DEFAULT_COVERING_CAP),
            Err(Error::FamilyTooLarge { .. })
        ));
    }

    #[test]
    fn random_covering_stays_inside() {
        let b = ball(vec![1.0, -2.0], 3.0);
        let cov = random_covering(&b, 1.0, 1_000_000, RngStream::root(3)).unwrap();
        assert!(!cov.points.is_empty());
        for p in &cov.points {
            let d: f64 = p
                .iter()
                .zip(&b.center)
                .map(|(a, c)| (a - c) * (a - c))
                .sum::<f64>()
                .sqrt();
            assert!(d <= b.radius * (1.0 + 1e-12));
        }
    }

    #[test]
    fn random_covering_mean_near_center() {
        let b = ball(vec![0.5], 2.0);
        let cov = random_covering(&b, 0.2, 10_000_000, RngStream::root(4)).unwrap();
        let l = cov.points.len() as f64;
        let mean: f64 = cov.points.iter().map(|p| p[0]).sum::<f64>() / l;
        assert!((mean - 0.5).abs() <= 4.0 * b.radius / l.sqrt());
    }

    #[test]
    fn random_covering_passes_verification_mostly() {
        // Coupon-collector check at K=1, R=1, eps 0.2.
        let b = ball(vec![0.0], 1.0);
        let mut passes = 0;
        for seed in 0..100 {
            let cov = random_covering(&b, 0.2, 1_000_000, RngStream::new(seed, 1)).unwrap();
            let rep = verify_cover(&cov, 200, RngStream::new(seed, 2)).unwrap();
            if rep.pass {
                passes += 1;
            }
        }
        assert!(passes >= 95, "only {passes}/100 random covers verified");
    }

    #[test]
    fn grid_covering_1d_example() {
        let b = ball(vec![0.0], 1.0);
        let cov = grid_covering(&b, 0.5, 1_000_000).unwrap();
        assert_eq!(cov.points, vec![vec![-1.0], vec![0.0], vec![1.0]]);
        // Determinism: byte-identical repeat.
        let again = grid_covering(&b, 0.5, 1_000_000).unwrap();
        assert_eq!(
            serde_json::to_string(&cov).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn grid_covering_always_verifies() {
        for (dim, eps) in [(1usize, 0.3), (2, 0.25), (3, 0.6)] {
            let b = ball(vec![0.25; dim], 1.5);
            let cov = grid_covering(&b, eps, 10_000_000).unwrap();
            let rep = verify_cover(&cov, 300, RngStream::root(dim as u64)).unwrap();
            assert!(rep.pass, "dim {dim}: max {} > {eps}", rep.max_distance);
            for p in &cov.points {
                let d: f64 = p
                    .iter()
                    .zip(&b.center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                assert!(d <= b.radius * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn verify_cover_center_only() {
        let b = ball(vec![0.0, 0.0], 2.0);
        let center_only = CoveringSet {
            ball: b.clone(),
            eps_cov: 2.0,
            method: CoveringMethod::Random,
            points: vec![vec![0.0, 0.0]],
        };
        let rep = verify_cover(&center_only, 100, RngStream::root(5)).unwrap();
        assert!(rep.pass);
        let tight = CoveringSet {
            eps_cov: 1.0,
            ..center_only
        };
        let rep = verify_cover(&tight, 200, RngStream::root(6)).unwrap();
        assert!(!rep.pass, "center-only cover at R/2 should fail");
        assert!(rep.max_distance > 1.0);
    }

    #[test]
    fn enumerate_counts_and_duplicate_filtering() {
        let b = ball(vec![0.0], 1.0);
        let mut cov = CoveringSet {
            ball: b,
            eps_cov: 0.5,
            method: CoveringMethod::Grid,
            points: vec![vec![-1.0], vec![-0.5], vec![0.0], vec![0.5], vec![1.0]],
        };
        let fam = enumerate_candidates(&cov, &CandidateFilters::default()).unwrap();
        // C(5,2) = 10 raw; none degenerate here.
        assert_eq!(fam.filters.raw_count, 10);
        assert_eq!(fam.len(), 10);
        // Lexicographic order of tuples.
        assert_eq!(fam.indices(0), &[0, 1]);
        assert_eq!(fam.indices(9), &[3, 4]);

        // Duplicate covering point forms a zero-volume candidate -> dropped.
        cov.points.push(vec![0.0]);
        let fam = enumerate_candidates(&cov, &CandidateFilters::default()).unwrap();
        assert_eq!(fam.filters.raw_count, 15);
        assert_eq!(fam.len(), 14);
        assert_eq!(fam.filters.dropped_degenerate, 1);
    }

    #[test]
    fn enumerate_caps_and_empty() {
        let b = ball(vec![0.0], 1.0);
        let cov = CoveringSet {
            ball: b,
            eps_cov: 0.5,
            method: CoveringMethod::Grid,
            points: (0..200).map(|i| vec![i as f64]).collect(),
        };
        let filters = CandidateFilters {
            candidate_cap: 100,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_candidates(&cov, &filters),
            Err(Error::TooManyCandidates { .. })
        ));
        // All-identical points: everything filtered, empty family.
        let cov = CoveringSet {
            ball: ball(vec![0.0], 1.0),
            eps_cov: 0.5,
            method: CoveringMethod::Grid,
            points: vec![vec![0.0], vec![0.0], vec![0.0]],
        };
        assert!(matches!(
            enumerate_candidates(&cov, &CandidateFilters::default()),
            Err(Error::EmptyFamily { .. })
        ));
    }

    #[test]
    fn representative_guarantee_k1_exhaustive() {
        // For a known interval inside the ball and the derived spacing, the
        // family holds a candidate within TV eps of the truth; exhaustive
        // scan against the closed form.
        let truth = Simplex::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let eps = 0.3;
        let qp = QuantizationParams::new(eps, 1.0, Provenance::Oracle, 1.0, 1).unwrap();
        let b = ball(vec![0.4], 1.2); // contains [0,1]
        let cov = grid_covering(&b, qp.eps_cov, 1_000_000).unwrap();
        let fam = enumerate_candidates(&cov, &CandidateFilters::default()).unwrap();
        let mut best = f64::INFINITY;
        for i in 0..fam.len() {
            let cand = fam.candidate(i);
            let tv = tv_uniform(&cand, &truth, MeasureMode::Exact, 0, RngStream::root(0))
                .unwrap()
                .value;
            best = best.min(tv);
        }
        assert!(best <= eps, "best TV {best} > {eps}");
    }

    #[test]
    fn snapping_stays_within_eps_and_in_family() {
        let mut rng = RngStream::root(31).rng();
        let params = IsoperimetryParams::new(1.0, 2.2).unwrap();
        for trial in 0..5 {
            let truth = random_simplex(2, &params, 1.0, &mut rng).unwrap();
            let centroid = truth.centroid();
            let radius = truth
                .vertices()
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&centroid)
                        .map(|(a, c)| (a - c) * (a - c))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0f64, f64::max)
                * 1.2;
            let b = ball(centroid, radius);
            let eps_cov = 0.05;
            let cov = grid_covering(&b, eps_cov, 10_000_000).unwrap();
            let (indices, snapped) = snap_vertices(&cov, &truth).unwrap();
            for (v, s) in truth.vertices().iter().zip(snapped.vertices()) {
                let d: f64 = v
                    .iter()
                    .zip(s)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(d <= eps_cov * (1.0 + 1e-9), "trial {trial}: moved {d}");
            }
            let mut sorted = indices.clone();
            sorted.sort_unstable();
            assert_eq!(sorted.len(), 3);
            assert!(sorted.windows(2).all(|w| w[0] < w[1]), "distinct indices");
        }
    }
}
