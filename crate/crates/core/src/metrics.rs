//! Distances between persistence diagrams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{Bar, PersistenceDiagram};

fn sup_norm(a: &Bar, b: &Bar) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn half_persistence(a: &Bar) -> f64 {
    (a.death - a.birth) / 2.0
}

fn check_dims(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::input(format!(
            "cannot compare diagrams of dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Essential bars can only be matched among themselves. Sorted order is an
/// optimal matching on the line for both the max cost and convex sums.
fn sorted_essential_births(d: &PersistenceDiagram) -> Vec<f64> {
    let mut v: Vec<f64> = d.essential().map(|b| b.birth).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Maximum bipartite matching by Hopcroft-Karp.
struct Matcher {
    adj: Vec<Vec<usize>>,
    n_right: usize,
}

impl Matcher {
    fn max_matching(&self) -> usize {
        const FREE: usize = usize::MAX;
        let n_left = self.adj.len();
        let mut match_l = vec![FREE; n_left];
        let mut match_r = vec![FREE; self.n_right];
        let mut dist = vec![0usize; n_left];
        let mut size = 0;
        loop {
            // BFS layering from free left vertices.
            let mut queue = std::collections::VecDeque::new();
            for u in 0..n_left {
                if match_l[u] == FREE {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = usize::MAX;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    let w = match_r[v];
                    if w == FREE {
                        found = true;
                    } else if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if !found {
                return size;
            }
            let mut it = vec![0usize; n_left];
            for u in 0..n_left {
                if match_l[u] == FREE
                    && self.augment(u, &mut match_l, &mut match_r, &mut dist, &mut it)
                {
                    size += 1;
                }
            }
        }
    }

    fn augment(
        &self,
        u: usize,
        match_l: &mut [usize],
        match_r: &mut [usize],
        dist: &mut [usize],
        it: &mut [usize],
    ) -> bool {
        while it[u] < self.adj[u].len() {
            let v = self.adj[u][it[u]];
            it[u] += 1;
            let w = match_r[v];
            let ok = w == usize::MAX
                || (dist[w] == dist[u] + 1 && self.augment(w, match_l, match_r, dist, it));
            if ok {
                match_l[u] = v;
                match_r[v] = u;
                return true;
            }
        }
        dist[u] = usize::MAX;
        false
    }
}

/// Can the finite bars be matched (diagonal allowed) with every cost at most `delta`?
fn feasible(a: &[Bar], b: &[Bar], delta: f64) -> bool {
    // Left: a_0..a_m, then diagonal copies of b. Right: b_0..b_n, then diagonal copies of a.
    let (m, n) = (a.len(), b.len());
    let mut adj = vec![Vec::new(); m + n];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            if sup_norm(p, q) <= delta {
                adj[i].push(j);
            }
        }
        if half_persistence(p) <= delta {
            adj[i].push(n + i);
        }
    }
    for (j, q) in b.iter().enumerate() {
        if half_persistence(q) <= delta {
            adj[m + j].push(j);
        }
        adj[m + j].extend(n..n + m);
    }
    Matcher { adj, n_right: n + m }.max_matching() == m + n
}

fn finite_bottleneck(a: &[Bar], b: &[Bar]) -> f64 {
    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(0.0);
    for p in a {
        candidates.extend(b.iter().map(|q| sup_norm(p, q)));
    }
    candidates.extend(a.iter().chain(b).map(half_persistence));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // Matching every bar to the diagonal is always feasible at the largest
    // half-persistence, so the last candidate is feasible.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Bottleneck distance. Essential bars are matched only to essential bars;
/// differing essential counts give `+∞`.
pub fn bottleneck(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> Result<f64> {
    check_dims(d1, d2)?;
    let (e1, e2) = (sorted_essential_births(d1), sorted_essential_births(d2));
    if e1.len() != e2.len() {
        return Ok(f64::INFINITY);
    }
    let essential = e1
        .iter()
        .zip(&e2)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let a: Vec<Bar> = d1.finite().copied().collect();
    let b: Vec<Bar> = d2.finite().copied().collect();
    Ok(essential.max(finite_bottleneck(&a, &b)))
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method with potentials). Returns the optimal total cost.
fn assignment_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    if n == 0 {
        return 0.0;
    }
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[p[j] - 1][j - 1]).sum()
}

/// q-Wasserstein distance with the sup-norm ground metric.
pub fn wasserstein(d1: &PersistenceDiagram, d2: &PersistenceDiagram, q: f64) -> Result<f64> {
    check_dims(d1, d2)?;
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::input(format!("Wasserstein order must be finite and >= 1, got {q}")));
    }
    let (e1, e2) = (sorted_essential_births(d1), sorted_essential_births(d2));
    if e1.len() != e2.len() {
        return Ok(f64::INFINITY);
    }
    let essential: f64 = e1.iter().zip(&e2).map(|(x, y)| (x - y).abs().powf(q)).sum();

    let a: Vec<Bar> = d1.finite().copied().collect();
    let b: Vec<Bar> = d2.finite().copied().collect();
    let (m, n) = (a.len(), b.len());
    let size = m + n;
    let finite_costs = a
        .iter()
        .flat_map(|p| b.iter().map(move |r| sup_norm(p, r).powf(q)))
        .chain(a.iter().chain(&b).map(|p| half_persistence(p).powf(q)));
    // Forbidden cells get a cost no optimal assignment can afford.
    let forbidden = 2.0 * (1.0 + finite_costs.sum::<f64>());
    let mut cost = vec![vec![forbidden; size]; size];
    for i in 0..m {
        for j in 0..n {
            cost[i][j] = sup_norm(&a[i], &b[j]).powf(q);
        }
        cost[i][n + i] = half_persistence(&a[i]).powf(q);
    }
    for j in 0..n {
        cost[m + j][j] = half_persistence(&b[j]).powf(q);
        for i in 0..m {
            cost[m + j][n + i] = 0.0;
        }
    }
    Ok((essential + assignment_cost(&cost)).powf(1.0 / q))
}

/// Symmetric matrix of barcode distances over a time series.
#[derive(Debug, Clone, PartialEq)]
pub struct BarcodeDistanceMatrix {
    homology_dim: usize,
    size: usize,
    entries: Vec<f64>,
}

impl BarcodeDistanceMatrix {
    pub fn from_row_major(homology_dim: usize, size: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::input(format!(
                "barcode distance buffer has {} entries, expected {}",
                entries.len(),
                size * size
            )));
        }
        for t in 0..size {
            if entries[t * size + t] != 0.0 {
                return Err(Error::input(format!("nonzero diagonal at {t}")));
            }
            for s in (t + 1)..size {
                let v = entries[t * size + s];
                if v.is_nan() || v < 0.0 || v != entries[s * size + t] {
                    return Err(Error::input(format!("invalid or asymmetric entry at ({t},{s})")));
                }
            }
        }
        Ok(Self {
            homology_dim,
            size,
            entries,
        })
    }

    pub fn homology_dim(&self) -> usize {
        self.homology_dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, t: usize, s: usize) -> f64 {
        self.entries[t * self.size + s]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.entries
    }

    /// Largest finite entry (0 for an all-zero or all-infinite matrix).
    pub fn max_finite(&self) -> f64 {
        self.entries
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn infinite_count(&self) -> usize {
        self.entries.iter().filter(|v| v.is_infinite()).count()
    }

    /// Multiply every entry by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Row-major CSV, `inf` for infinite entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for t in 0..self.size {
            let row: Vec<String> = (0..self.size)
                .map(|s| crate::ingest::format_real(self.get(t, s)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(homology_dim: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut rows = 0;
        for (line_no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            for field in line.split(',') {
                entries.push(crate::ingest::parse_real(field.trim()).map_err(|e| {
                    e.context(format!("distance matrix csv line {}", line_no + 1))
                })?);
            }
            rows += 1;
        }
        Self::from_row_major(homology_dim, rows, entries)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    homology_dim: usize,
    size: usize,
    rows: Vec<Vec<Option<f64>>>,
}

impl Serialize for BarcodeDistanceMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            homology_dim: self.homology_dim,
            size: self.size,
            rows: (0..self.size)
                .map(|t| {
                    (0..self.size)
                        .map(|s| Some(self.get(t, s)).filter(|v| v.is_finite()))
                        .collect()
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BarcodeDistanceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        let entries = repr
            .rows
            .into_iter()
            .flatten()
            .map(|v| v.unwrap_or(f64::INFINITY))
            .collect();
        BarcodeDistanceMatrix::from_row_major(repr.homology_dim, repr.size, entries)
            .map_err(serde::de::Error::custom)
    }
}

/// Bottleneck distances between every pair of diagrams in `series`. Pairs
/// are evaluated in parallel on the current rayon pool; the result does not
/// depend on scheduling.
pub fn pairwise_bottleneck(series: &[PersistenceDiagram]) -> Result<BarcodeDistanceMatrix> {
    let size = series.len();
    let dim = series.first().map_or(0, PersistenceDiagram::dim);
    if let Some((t, d)) = series.iter().enumerate().find(|(_, d)| d.dim() != dim) {
        return Err(Error::input(format!(
            "diagram at t={} has dimension {}, expected {dim}",
            t + 1,
            d.dim()
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..size)
        .flat_map(|t| ((t + 1)..size).map(move |s| (t, s)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(t, s)| {
            bottleneck(&series[t], &series[s])
                .map_err(|e| e.context(format!("bottleneck between t={} and t={}", t + 1, s + 1)))
        })
        .collect::<Result<_>>()?;
    let mut entries = vec![0.0; size * size];
    for (&(t, s), v) in pairs.iter().zip(values) {
        entries[t * size + s] = v;
        entries[s * size + t] = v;
    }
    Ok(BarcodeDistanceMatrix {
        homology_dim: dim,
        size,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dgm(bars: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(1, bars.iter().map(|&(b, d)| Bar::new(b, d)).collect())
    }

    #[test]
    fn identity_is_zero() {
        let a = dgm(&[(0.0, 2.0), (1.0, 1.5)]);
        assert_eq!(bottleneck(&a, &a).unwrap(), 0.0);
        assert_eq!(wasserstein(&a, &a, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn single_bar_against_empty() {
        let a = dgm(&[(0.0, 2.0)]);
        let e = dgm(&[]);
        assert_eq!(bottleneck(&a, &e).unwrap(), 1.0);
        for q in [1.0, 2.0, 3.5] {
            assert!((wasserstein(&a, &e, q).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_match_beats_diagonal() {
        let a = dgm(&[(0.0, 2.0)]);
        let b = dgm(&[(0.5, 2.5)]);
        assert_eq!(bottleneck(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn essential_policy() {
        let a = PersistenceDiagram::new(0, vec![Bar::essential(0.0), Bar::new(0.0, 1.0)]);
        let b = PersistenceDiagram::new(0, vec![Bar::essential(0.0)]);
        let c = PersistenceDiagram::new(0, vec![Bar::essential(0.0), Bar::essential(0.2)]);
        assert_eq!(bottleneck(&a, &b).unwrap(), 0.5);
        assert_eq!(bottleneck(&a, &c).unwrap(), f64::INFINITY);
        let d = PersistenceDiagram::new(0, vec![Bar::essential(0.3)]);
        assert_eq!(bottleneck(&b, &d).unwrap(), 0.3);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = PersistenceDiagram::empty(0);
        let b = PersistenceDiagram::empty(1);
        assert!(bottleneck(&a, &b).is_err());
        assert!(wasserstein(&a, &b, 1.0).is_err());
        assert!(pairwise_bottleneck(&[a, b]).is_err());
    }

    #[test]
    fn pairwise_block_structure() {
        let a = dgm(&[(0.0, 2.0)]);
        let b = dgm(&[(0.0, 1.0)]);
        let m = pairwise_bottleneck(&[a.clone(), a, b]).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(0, 2), 1.0);
        assert_eq!(m.get(2, 1), 1.0);
        assert_eq!(m.get(2, 2), 0.0);
    }

    #[test]
    fn matrix_serialization() {
        let m = BarcodeDistanceMatrix::from_row_major(1, 2, vec![0.0, f64::INFINITY, f64::INFINITY, 0.0])
            .unwrap();
        let csv = m.to_csv();
        assert!(csv.contains("inf"));
        assert_eq!(BarcodeDistanceMatrix::from_csv(1, &csv).unwrap(), m);
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("null"));
        assert_eq!(serde_json::from_str::<BarcodeDistanceMatrix>(&json).unwrap(), m);
    }
}
