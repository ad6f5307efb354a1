//! Empirical ball-volume curves and correlation-dimension estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;
use crate::metrics::BarcodeDistanceMatrix;

/// Read access to a symmetric distance matrix with zero diagonal.
pub trait SymmetricDistances {
    fn size(&self) -> usize;
    fn distance(&self, i: usize, j: usize) -> f64;
}

impl SymmetricDistances for DistanceMatrix {
    fn size(&self) -> usize {
        DistanceMatrix::size(self)
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

impl SymmetricDistances for BarcodeDistanceMatrix {
    fn size(&self) -> usize {
        BarcodeDistanceMatrix::size(self)
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    BarcodeDistance,
    CloudDistance,
}

/// `ψ̂(r)`: fraction of ordered off-diagonal pairs within distance `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallVolumeCurve {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Off-diagonal pair counts behind each value (ordered pairs).
    pub counts: Vec<u64>,
    pub basis: Basis,
}

impl BallVolumeCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,psi\n");
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{}\n",
                crate::ingest::format_real(*r),
                crate::ingest::format_real(*v)
            ));
        }
        out
    }
}

/// U-statistic ball volume `ψ̂(r) = (T(T-1))^-1 Σ_{t≠s} 1{D[t][s] <= r}`.
pub fn empirical_ball_volume(
    d: &impl SymmetricDistances,
    radii: &[f64],
    basis: Basis,
) -> Result<BallVolumeCurve> {
    let t = d.size();
    if t < 2 {
        return Err(Error::input(format!("ball volumes need at least 2 elements, got {t}")));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|r| r.is_nan()) {
        return Err(Error::input("radii must be strictly increasing"));
    }
    let mut upper: Vec<f64> = Vec::with_capacity(t * (t - 1) / 2);
    for i in 0..t {
        for j in (i + 1)..t {
            upper.push(d.distance(i, j));
        }
    }
    upper.sort_by(f64::total_cmp);
    let denom = (t * (t - 1)) as f64;
    let counts: Vec<u64> = radii
        .iter()
        .map(|&r| 2 * upper.partition_point(|&x| x <= r) as u64)
        .collect();
    Ok(BallVolumeCurve {
        radii: radii.to_vec(),
        values: counts.iter().map(|&c| c as f64 / denom).collect(),
        counts,
        basis,
    })
}

/// `[5th, 50th]` percentile of the positive off-diagonal distances.
pub fn default_fit_range(d: &impl SymmetricDistances) -> Result<(f64, f64)> {
    let mut pos: Vec<f64> = Vec::new();
    for i in 0..d.size() {
        for j in (i + 1)..d.size() {
            let x = d.distance(i, j);
            if x > 0.0 && x.is_finite() {
                pos.push(x);
            }
        }
    }
    if pos.is_empty() {
        return Err(Error::input("no positive finite distances"));
    }
    pos.sort_by(f64::total_cmp);
    Ok((
        crate::null_limits::empirical_quantile(&pos, 0.05),
        crate::null_limits::empirical_quantile(&pos, 0.5),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub slope: f64,
    pub stderr: f64,
    pub used_radii: Vec<f64>,
    /// Radii in range dropped because `ψ̂ = 0`.
    pub excluded_radii: Vec<f64>,
}

/// Least-squares slope of `log ψ̂(r)` against `log r` for `r` in `fit_range`.
pub fn correlation_dimension(curve: &BallVolumeCurve, fit_range: (f64, f64)) -> Result<DimensionFit> {
    let (lo, hi) = fit_range;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for (&r, &v) in curve.radii.iter().zip(&curve.values) {
        if r < lo || r > hi || r <= 0.0 {
            continue;
        }
        if v > 0.0 {
            xs.push(r.ln());
            ys.push(v.ln());
            used.push(r);
        } else {
            excluded.push(r);
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::input(format!(
            "need at least 3 radii with positive ball volume in [{lo}, {hi}], found {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::input("fit radii are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(DimensionFit {
        slope,
        stderr,
        used_radii: used,
        excluded_radii: excluded,
    })
}
