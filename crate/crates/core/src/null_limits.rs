//! Monte Carlo calibration of the pivotal limit laws.
//!
//! Each limit is a functional of `W(u) = u B(u) - u^2 B(1)` for a standard
//! Brownian motion `B`, discretized on the uniform grid `i / N` with
//! left-endpoint rectangle sums for the integrals.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::change::{trimmed_range, StatisticId};
use crate::error::{Error, Result};

pub const QUANTILE_FORMAT_VERSION: u32 = 1;

/// Default Monte Carlo sizes.
pub const DEFAULT_PATHS: usize = 20_000;
pub const DEFAULT_GRID: usize = 1_000;

/// Brownian motion sampled at `i / N`, `i = 0..=N`, starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    values: Vec<f64>,
}

impl BrownianPath {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::input("a path needs at least two steps"));
        }
        if values[0] != 0.0 {
            return Err(Error::input("a Brownian path must start at zero"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("path values must be finite"));
        }
        Ok(Self { values })
    }

    /// `steps` independent `N(0, 1/steps)` increments.
    pub fn simulate(steps: usize, rng: &mut impl rand::Rng) -> Self {
        let sd = (1.0 / steps as f64).sqrt();
        let mut values = Vec::with_capacity(steps + 1);
        values.push(0.0);
        let mut b = 0.0;
        for _ in 0..steps {
            let z: f64 = StandardNormal.sample(rng);
            b += sd * z;
            values.push(b);
        }
        Self { values }
    }

    /// The path used for draw `index` of a table with the given seed.
    pub fn for_draw(seed: u64, index: u64, steps: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self::simulate(steps, &mut rng)
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    fn bridge(&self) -> Vec<f64> {
        let n = self.steps() as f64;
        let end = self.values[self.steps()];
        self.values
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let u = i as f64 / n;
                u * b - u * u * end
            })
            .collect()
    }
}

fn degenerate_path(what: &str) -> Error {
    Error::degenerate(format!("{what}: path functional has a vanishing denominator"))
}

/// `sup_u |W(u)| / (∫ W^2)^{1/2}`.
pub fn draw_dmax(path: &BrownianPath) -> Result<f64> {
    let w = path.bridge();
    let n = path.steps();
    let integral: f64 = w[..n].iter().map(|x| x * x).sum::<f64>() / n as f64;
    if integral == 0.0 {
        return Err(degenerate_path("Dmax"));
    }
    let sup = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(sup / integral.sqrt())
}

/// `∫ W^2 / (∫ W^4)^{1/2}`.
pub fn draw_dl(path: &BrownianPath) -> Result<f64> {
    let w = path.bridge();
    let n = path.steps() as f64;
    let squares: f64 = w[..path.steps()].iter().map(|x| x * x).sum::<f64>() / n;
    let quartic: f64 = w[..path.steps()].iter().map(|x| x.powi(4)).sum::<f64>() / n;
    if quartic == 0.0 {
        return Err(degenerate_path("DL"));
    }
    Ok(squares / quartic.sqrt())
}

/// `sup_u W(u)^2 / (V_1(u) + V_2(u))` over the trimmed grid, with
/// `V_1(u) = ∫_0^u (v B(v) - (v/u)^2 u B(u))^2 dv` and
/// `V_2(u) = ∫_u^1 (C(v) - ((1-v)/(1-u))^2 C(u))^2 dv`,
/// `C(v) = (1 - v)(B(1) - B(v))`.
pub fn draw_q(path: &BrownianPath, trim: f64) -> Result<f64> {
    let n = path.steps();
    let (lo, hi) = trimmed_range(n, trim)?;
    let nf = n as f64;
    let b = path.values();
    let end = b[n];
    let v = |i: usize| i as f64 / nf;
    let fwd: Vec<f64> = (0..=n).map(|i| v(i) * b[i]).collect();
    let bwd: Vec<f64> = (0..=n).map(|i| (1.0 - v(i)) * (end - b[i])).collect();

    // Prefix sums over i < j of A^2, v^2 A, v^4.
    let mut p_aa = vec![0.0; n + 1];
    let mut p_va = vec![0.0; n + 1];
    let mut p_v4 = vec![0.0; n + 1];
    for i in 0..n {
        let vi2 = v(i) * v(i);
        p_aa[i + 1] = p_aa[i] + fwd[i] * fwd[i];
        p_va[i + 1] = p_va[i] + vi2 * fwd[i];
        p_v4[i + 1] = p_v4[i] + vi2 * vi2;
    }
    // Suffix sums over j <= i < N of C^2, w C, w^2 with w = (1 - v)^2.
    let mut s_cc = vec![0.0; n + 1];
    let mut s_wc = vec![0.0; n + 1];
    let mut s_ww = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let w = (1.0 - v(i)).powi(2);
        s_cc[i] = s_cc[i + 1] + bwd[i] * bwd[i];
        s_wc[i] = s_wc[i + 1] + w * bwd[i];
        s_ww[i] = s_ww[i + 1] + w * w;
    }

    let mut best: Option<f64> = None;
    for j in lo..=hi {
        let u = v(j);
        let a = fwd[j] / (u * u);
        let v1 = (p_aa[j] - 2.0 * a * p_va[j] + a * a * p_v4[j]).max(0.0) / nf;
        let c = bwd[j] / (1.0 - u).powi(2);
        let v2 = (s_cc[j] - 2.0 * c * s_wc[j] + c * c * s_ww[j]).max(0.0) / nf;
        let denom = v1 + v2;
        if denom == 0.0 {
            continue;
        }
        let w = u * b[j] - u * u * end;
        let x = w * w / denom;
        if best.is_none_or(|m| x > m) {
            best = Some(x);
        }
    }
    best.ok_or_else(|| degenerate_path("Q"))
}

pub fn draw(stat: StatisticId, path: &BrownianPath, trim: f64) -> Result<f64> {
    match stat {
        StatisticId::Dmax => draw_dmax(path),
        StatisticId::DL => draw_dl(path),
        StatisticId::Q => draw_q(path, trim),
    }
}

/// Monte Carlo settings, recorded verbatim in every table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McParams {
    pub paths: usize,
    pub grid: usize,
    pub seed: u64,
    /// Trim of the split-point range; only meaningful for Q.
    pub trim: Option<f64>,
}

impl McParams {
    pub fn new(paths: usize, grid: usize, seed: u64) -> Self {
        Self {
            paths,
            grid,
            seed,
            trim: None,
        }
    }

    pub fn with_trim(mut self, trim: f64) -> Self {
        self.trim = Some(trim);
        self
    }
}

/// Empirical upper quantiles `q_{1-α}` of a limit law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub format_version: u32,
    pub statistic: StatisticId,
    pub alphas: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub mc_params: McParams,
    /// All draws in ascending order, for Monte Carlo p-values.
    pub sorted_draws: Vec<f64>,
}

/// Linear-interpolation (type 7) quantile of ascending data.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Simulate `params.paths` draws and tabulate `q_{1-α}` for each `α`.
/// Draw `i` uses its own RNG stream, so the result does not depend on the
/// number of worker threads.
pub fn build_table(stat: StatisticId, params: McParams, alphas: &[f64]) -> Result<QuantileTable> {
    if params.paths < 1000 {
        return Err(Error::input(format!("need at least 1000 paths, got {}", params.paths)));
    }
    if params.grid < 100 {
        return Err(Error::input(format!("need a grid of at least 100 steps, got {}", params.grid)));
    }
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::input("alphas must be non-empty and lie in (0, 1)"));
    }
    let trim = match (stat, params.trim) {
        (StatisticId::Q, Some(t)) => t,
        (StatisticId::Q, None) => return Err(Error::input("Q tables need a trim")),
        (_, _) => 0.0,
    };
    let mut draws: Vec<f64> = (0..params.paths)
        .into_par_iter()
        .map(|i| {
            let path = BrownianPath::for_draw(params.seed, i as u64, params.grid);
            draw(stat, &path, trim).map_err(|e| e.context(format!("draw {i}")))
        })
        .collect::<Result<_>>()?;
    draws.sort_by(f64::total_cmp);
    let quantiles = alphas
        .iter()
        .map(|a| empirical_quantile(&draws, 1.0 - a))
        .collect();
    Ok(QuantileTable {
        format_version: QUANTILE_FORMAT_VERSION,
        statistic: stat,
        alphas: alphas.to_vec(),
        quantiles,
        mc_params: McParams {
            trim: (stat == StatisticId::Q).then_some(trim),
            ..params
        },
        sorted_draws: draws,
    })
}

impl QuantileTable {
    /// `q_{1-α}`: the tabulated value if `α` was requested, otherwise
    /// interpolated from the stored draws.
    pub fn quantile(&self, alpha: f64) -> f64 {
        match self.alphas.iter().position(|&a| a == alpha) {
            Some(i) => self.quantiles[i],
            None => empirical_quantile(&self.sorted_draws, 1.0 - alpha),
        }
    }

    /// `(1 + #{draws >= x}) / (M + 1)`.
    pub fn p_value(&self, x: f64) -> f64 {
        let below = self.sorted_draws.partition_point(|&d| d < x);
        let at_least = self.sorted_draws.len() - below;
        (1 + at_least) as f64 / (self.sorted_draws.len() + 1) as f64
    }

    /// Empirical CDF of the draws at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted_draws.partition_point(|&d| d <= x) as f64 / self.sorted_draws.len() as f64
    }
}

pub fn cache_store(table: &QuantileTable, path: &Path) -> Result<()> {
    let text = serde_json::to_string(table).expect("quantile tables serialize");
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn cache_load(path: &Path) -> Result<QuantileTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::format(path, "missing format_version"))?;
    if found != u64::from(QUANTILE_FORMAT_VERSION) {
        return Err(Error::Version {
            path: path.to_path_buf(),
            found: found as u32,
            expected: QUANTILE_FORMAT_VERSION,
        });
    }
    let table: QuantileTable =
        serde_json::from_value(value).map_err(|e| Error::format(path, e.to_string()))?;
    if table.alphas.len() != table.quantiles.len() || table.sorted_draws.is_empty() {
        return Err(Error::format(path, "inconsistent quantile table"));
    }
    Ok(table)
}

/// Canonical cache file name for a table's parameters.
pub fn cache_file_name(stat: StatisticId, params: &McParams) -> String {
    let trim = params
        .trim
        .map(|t| format!("_trim{t}"))
        .unwrap_or_default();
    format!(
        "{}_M{}_N{}_seed{}{}.json",
        stat.name(),
        params.paths,
        params.grid,
        params.seed,
        trim
    )
}
