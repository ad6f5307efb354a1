use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::BarcodeDistanceMatrix;

/// Strictly increasing radii in `(0, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    r_max: f64,
    values: Vec<f64>,
}

impl RadiusGrid {
    pub fn new(r_max: f64, values: Vec<f64>) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::degenerate(format!(
                "radius range must be positive and finite, got {r_max}"
            )));
        }
        if values.is_empty() {
            return Err(Error::input("radius grid is empty"));
        }
        if values.iter().any(|&r| !(r > 0.0) || r > r_max) {
            return Err(Error::input(format!("radius grid values must lie in (0, {r_max}]")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("radius grid must be strictly increasing"));
        }
        Ok(Self { r_max, values })
    }

    /// `count` equally spaced radii `i * r_max / count`, `i = 1..=count`.
    pub fn uniform(r_max: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::input("radius grid needs at least one point"));
        }
        let values = (1..=count)
            .map(|i| (i as f64 * r_max / count as f64).min(r_max))
            .collect();
        Self::new(r_max, values)
    }

    /// Default grid for a barcode distance matrix: `r_max` is the largest
    /// finite distance unless overridden, `count` defaults to `min(T, 100)`.
    pub fn for_distances(
        d: &BarcodeDistanceMatrix,
        count: Option<usize>,
        r_max: Option<f64>,
    ) -> Result<Self> {
        let count = count.unwrap_or_else(|| d.size().min(100));
        let r_max = r_max.unwrap_or_else(|| d.max_finite());
        if r_max <= 0.0 {
            return Err(Error::degenerate(
                "all finite barcode distances are zero; the kernel is constant",
            ));
        }
        Self::uniform(r_max, count)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.r_max * c, self.values.iter().map(|r| r * c).collect())
    }
}

/// Indicator kernel `h(t, s, r) = 1{d_B(t, s) <= r}` on a radius grid, with
/// forward and backward cumulative pair counts per radius.
///
/// For radius index `i`:
/// `forward[i][k]  = #{(s, t) : s, t <= k, h = 1}` for `k = 0..=T`, and
/// `backward[i][k] = #{(s, t) : s, t > k,  h = 1}`.
/// Time indices are 1-based in these definitions.
#[derive(Debug, Clone)]
pub struct KernelField {
    distances: BarcodeDistanceMatrix,
    grid: RadiusGrid,
    forward: Vec<Vec<u64>>,
    backward: Vec<Vec<u64>>,
}

pub(crate) fn indicator(d: f64, r: f64) -> bool {
    // +inf never falls below a finite radius.
    d <= r
}

fn cumulative_counts(d: &BarcodeDistanceMatrix, r: f64) -> (Vec<u64>, Vec<u64>) {
    let t_len = d.size();
    let mut forward = vec![0u64; t_len + 1];
    for k in 1..=t_len {
        let row = k - 1;
        let cross = (0..row).filter(|&s| indicator(d.get(row, s), r)).count() as u64;
        let diag = u64::from(indicator(d.get(row, row), r));
        forward[k] = forward[k - 1] + 2 * cross + diag;
    }
    let mut backward = vec![0u64; t_len + 1];
    for k in (0..t_len).rev() {
        // Adds time k+1 (row k) to the block {k+2, ..., T}.
        let row = k;
        let cross = ((row + 1)..t_len)
            .filter(|&s| indicator(d.get(row, s), r))
            .count() as u64;
        let diag = u64::from(indicator(d.get(row, row), r));
        backward[k] = backward[k + 1] + 2 * cross + diag;
    }
    (forward, backward)
}

impl KernelField {
    pub fn new(distances: BarcodeDistanceMatrix, grid: RadiusGrid) -> Result<Self> {
        if distances.size() == 0 {
            return Err(Error::input("kernel field needs at least one time step"));
        }
        let (forward, backward) = grid
            .values()
            .iter()
            .map(|&r| cumulative_counts(&distances, r))
            .unzip();
        Ok(Self {
            distances,
            grid,
            forward,
            backward,
        })
    }

    /// Series length T.
    pub fn len(&self) -> usize {
        self.distances.size()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.size() == 0
    }

    pub fn grid(&self) -> &RadiusGrid {
        &self.grid
    }

    pub fn distances(&self) -> &BarcodeDistanceMatrix {
        &self.distances
    }

    /// `h(t, s, r)` with 1-based times.
    pub fn h(&self, t: usize, s: usize, r: f64) -> u64 {
        u64::from(indicator(self.distances.get(t - 1, s - 1), r))
    }

    /// Pair count over `s, t <= k` at grid radius `ri`.
    pub fn forward_count(&self, ri: usize, k: usize) -> u64 {
        self.forward[ri][k]
    }

    /// Pair count over `s, t > k` at grid radius `ri`.
    pub fn backward_count(&self, ri: usize, k: usize) -> u64 {
        self.backward[ri][k]
    }

    /// Pair count over `s, t <= k` at an arbitrary radius.
    pub fn forward_count_at(&self, r: f64, k: usize) -> u64 {
        match self.grid.values().iter().position(|&g| g == r) {
            Some(ri) => self.forward[ri][k],
            None => {
                let mut n = 0;
                for t in 0..k {
                    for s in 0..k {
                        n += u64::from(indicator(self.distances.get(t, s), r));
                    }
                }
                n
            }
        }
    }

    /// `T^4 U_T(k/T, r_i) = T^2 N_k - k^2 N_T`, exact.
    pub(crate) fn centered(&self, ri: usize, k: usize) -> i128 {
        let t = self.len() as i128;
        let k = k as i128;
        t * t * self.forward[ri][k as usize] as i128 - k * k * self.forward[ri][self.len()] as i128
    }

    /// Number of `+inf` off-diagonal distances (counted once per unordered pair).
    pub fn infinite_pairs(&self) -> usize {
        self.distances.infinite_count() / 2
    }

    /// Same kernel with every distance and radius multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.distances.scaled(c), self.grid.scaled(c)?)
    }
}

/// Index `⌊uT⌋` of the canonical time grid.
pub fn grid_index(u: f64, t_len: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::input(format!("u must lie in [0, 1], got {u}")));
    }
    // u = k/T rarely multiplies back to exactly k.
    let x = u * t_len as f64;
    let snapped = if (x - x.round()).abs() < 1e-9 { x.round() } else { x.floor() };
    Ok((snapped as usize).min(t_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bdm(rows: &[&[f64]]) -> BarcodeDistanceMatrix {
        let n = rows.len();
        BarcodeDistanceMatrix::from_row_major(1, n, rows.concat()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RadiusGrid::new(1.0, vec![]).is_err());
        assert!(RadiusGrid::new(1.0, vec![0.5, 0.5]).is_err());
        assert!(RadiusGrid::new(1.0, vec![1.5]).is_err());
        assert!(RadiusGrid::new(0.0, vec![0.0]).is_err());
        let g = RadiusGrid::uniform(2.0, 4).unwrap();
        assert_eq!(g.values(), &[0.5, 1.0, 1.5, 2.0]);
        // i * r / n can round above r at i = n.
        let g = RadiusGrid::uniform(0.6781061882702216, 50).unwrap();
        assert_eq!(*g.values().last().unwrap(), 0.6781061882702216);
    }

    #[test]
    fn zero_distances_are_degenerate() {
        let d = bdm(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let err = RadiusGrid::for_distances(&d, None, None).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn counts_match_definition() {
        let inf = f64::INFINITY;
        let d = bdm(&[&[0.0, 1.0, inf], &[1.0, 0.0, 2.0], &[inf, 2.0, 0.0]]);
        let k = KernelField::new(d, RadiusGrid::new(2.0, vec![0.5, 1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(k.forward_count(0, 3), 3);
        assert_eq!(k.forward_count(1, 2), 4);
        assert_eq!(k.forward_count(2, 3), 7);
        assert_eq!(k.backward_count(2, 0), 7);
        assert_eq!(k.backward_count(2, 1), 4);
        assert_eq!(k.backward_count(1, 1), 2);
        assert_eq!(k.backward_count(0, 3), 0);
        assert_eq!(k.infinite_pairs(), 1);
        assert_eq!(k.forward_count_at(1.5, 3), 5);
    }

    #[test]
    fn grid_index_floor() {
        assert_eq!(grid_index(0.0, 10).unwrap(), 0);
        assert_eq!(grid_index(0.35, 10).unwrap(), 3);
        assert_eq!(grid_index(1.0, 10).unwrap(), 10);
        assert!(grid_index(1.5, 10).is_err());
        for t in 1..200 {
            for k in 0..=t {
                assert_eq!(grid_index(k as f64 / t as f64, t).unwrap(), k);
            }
        }
    }
}
