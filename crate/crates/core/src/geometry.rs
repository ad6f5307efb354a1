//! Finite metric spaces: point clouds, distance matrices, Hausdorff and
//! correspondence-distortion bounds on the Gromov-Hausdorff distance, and
//! greedy covers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of points in a common Euclidean space, tagged with its time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    time_index: usize,
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(time_index: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::input(format!("point cloud at t={time_index} is empty")))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::input(format!(
                "point cloud at t={time_index} has zero ambient dimension"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::input(format!(
                    "point {i} at t={time_index} has dimension {} (expected {dim})",
                    p.len()
                )));
            }
            if let Some(x) = p.iter().find(|x| !x.is_finite()) {
                return Err(Error::input(format!(
                    "point {i} at t={time_index} has non-finite coordinate {x}"
                )));
            }
        }
        Ok(Self {
            time_index,
            dim,
            points,
        })
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Keep only the points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        PointCloud::new(self.time_index, points)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Dense symmetric matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Build from a row-major `n × n` buffer, checking symmetry, zero
    /// diagonal and non-negativity.
    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("distance matrix must have at least one row"));
        }
        if entries.len() != n * n {
            return Err(Error::input(format!(
                "distance matrix buffer has {} entries, expected {}",
                entries.len(),
                n * n
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::input(format!("nonzero diagonal entry at {i}")));
            }
            for j in (i + 1)..n {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if a.is_nan() || a < 0.0 {
                    return Err(Error::input(format!("invalid distance {a} at ({i},{j})")));
                }
                if a != b {
                    return Err(Error::input(format!(
                        "asymmetric distances at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("distance matrix rows must all have length n"));
        }
        Self::from_row_major(n, rows.concat())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Largest entry; zero for a single point.
    pub fn diameter(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.entries
    }
}

/// How to turn a point cloud into a finite metric space.
#[derive(Debug, Clone)]
pub enum Metric {
    Euclidean,
    /// Distances supplied by the caller; must match the cloud's size.
    Precomputed(DistanceMatrix),
}

pub fn pairwise_distances(cloud: &PointCloud, metric: &Metric) -> Result<DistanceMatrix> {
    match metric {
        Metric::Precomputed(d) => {
            if d.size() != cloud.len() {
                return Err(Error::input(format!(
                    "precomputed matrix has size {}, cloud has {} points",
                    d.size(),
                    cloud.len()
                )));
            }
            Ok(d.clone())
        }
        Metric::Euclidean => {
            let n = cloud.len();
            let mut entries = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = euclidean(cloud.point(i), cloud.point(j));
                    entries[i * n + j] = d;
                    entries[j * n + i] = d;
                }
            }
            Ok(DistanceMatrix { n, entries })
        }
    }
}

fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    a.points()
        .iter()
        .map(|p| {
            b.points()
                .iter()
                .map(|q| euclidean(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two clouds living in the same ambient space.
/// This upper-bounds their Gromov-Hausdorff distance.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::input(format!(
            "ambient dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// The pairing `(i, i)` for two spaces of equal size.
pub fn aligned_pairing(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, i)).collect()
}

/// Distortion `sup |d_A(x, x') - d_B(y, y')|` over all pairs of matched
/// pairs. Half of it bounds the Gromov-Hausdorff distance from above.
pub fn correspondence_distortion(
    a: &DistanceMatrix,
    b: &DistanceMatrix,
    pairing: &[(usize, usize)],
) -> Result<f64> {
    let mut seen_a = vec![false; a.size()];
    let mut seen_b = vec![false; b.size()];
    for &(i, j) in pairing {
        if i >= a.size() || j >= b.size() {
            return Err(Error::input(format!("pair ({i},{j}) is out of range")));
        }
        seen_a[i] = true;
        seen_b[j] = true;
    }
    if let Some(i) = seen_a.iter().position(|s| !s) {
        return Err(Error::input(format!("pairing misses point {i} of the first space")));
    }
    if let Some(j) = seen_b.iter().position(|s| !s) {
        return Err(Error::input(format!("pairing misses point {j} of the second space")));
    }
    let mut worst = 0.0f64;
    for (p, &(x, y)) in pairing.iter().enumerate() {
        for &(x2, y2) in &pairing[p + 1..] {
            worst = worst.max((a.get(x, x2) - b.get(y, y2)).abs());
        }
    }
    Ok(worst)
}

/// Centers of a cover of a finite metric space by closed balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub center_indices: Vec<usize>,
    pub radius: f64,
    pub size: usize,
}

impl CoverReport {
    /// Does every point lie within `radius` of a center?
    pub fn covers(&self, d: &DistanceMatrix) -> bool {
        (0..d.size()).all(|j| {
            self.center_indices
                .iter()
                .any(|&c| d.get(c, j) <= self.radius)
        })
    }
}

/// Farthest-first traversal from `start`, stopping at `k` centers or as soon
/// as `stop` returns true for the current covering radius.
fn farthest_first(
    d: &DistanceMatrix,
    start: usize,
    k: usize,
    mut stop: impl FnMut(f64) -> bool,
) -> (Vec<usize>, f64) {
    let n = d.size();
    let mut centers = vec![start];
    let mut nearest: Vec<f64> = d.row(start).to_vec();
    loop {
        // Ties go to the lowest index.
        let (far, radius) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
        if centers.len() >= k || stop(radius) || centers.len() == n {
            return (centers, radius.max(0.0));
        }
        centers.push(far);
        for (j, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(d.get(far, j));
        }
    }
}

/// Greedy cover at a fixed radius: the shortest prefix of the farthest-first
/// ordering from point 0 whose covering radius is at most `radius`.
pub fn greedy_cover(d: &DistanceMatrix, radius: f64) -> Result<CoverReport> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::input(format!("cover radius must be positive, got {radius}")));
    }
    let (centers, _) = farthest_first(d, 0, usize::MAX, |r| r <= radius);
    Ok(CoverReport {
        size: centers.len(),
        center_indices: centers,
        radius,
    })
}

/// Gonzalez farthest-point sampling of `k` centers starting at `start`.
/// Returns the centers and the resulting covering radius, which is within a
/// factor two of the optimal k-center radius.
pub fn farthest_point_sample(
    d: &DistanceMatrix,
    k: usize,
    start: usize,
) -> Result<(Vec<usize>, f64)> {
    let n = d.size();
    if k == 0 || k > n {
        return Err(Error::input(format!("k must be in 1..={n}, got {k}")));
    }
    if start >= n {
        return Err(Error::input(format!("start index {start} out of range")));
    }
    Ok(farthest_first(d, start, k, |_| false))
}
