//! Test reports: the decision for each statistic together with everything
//! needed to recompute it.

use serde::{Deserialize, Serialize};

use crate::change::{Argmax, RadiusGrid, StatisticId};
use crate::null_limits::McParams;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Settings of one analysis run. Parallelism is deliberately absent: it
/// never changes the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub homology_dim: usize,
    /// Rips truncation scale; `None` builds the full filtration.
    pub rips_r_max: Option<f64>,
    /// Number of radii `R`; `None` uses `min(T, 100)`.
    pub grid_size: Option<usize>,
    /// Largest radius; `None` uses the largest finite barcode distance.
    pub grid_r_max: Option<f64>,
    pub statistics: Vec<StatisticId>,
    pub alpha: f64,
    pub trim: f64,
    pub mc_paths: usize,
    pub mc_grid: usize,
    pub mc_seed: u64,
    pub skip_degenerate: bool,
    pub simplex_budget: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            homology_dim: 1,
            rips_r_max: None,
            grid_size: None,
            grid_r_max: None,
            statistics: StatisticId::ALL.to_vec(),
            alpha: 0.05,
            trim: 0.05,
            mc_paths: crate::null_limits::DEFAULT_PATHS,
            mc_grid: crate::null_limits::DEFAULT_GRID,
            mc_seed: 0,
            skip_degenerate: true,
            simplex_budget: crate::persistence::DEFAULT_SIMPLEX_BUDGET,
        }
    }
}

impl AnalysisConfig {
    /// Monte Carlo parameters of the table calibrating `stat`.
    pub fn mc_params(&self, stat: StatisticId) -> McParams {
        let params = McParams::new(self.mc_paths, self.mc_grid, self.mc_seed);
        if stat == StatisticId::Q {
            params.with_trim(self.trim)
        } else {
            params
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub length: usize,
    pub counts: Vec<usize>,
    pub dim: usize,
    pub checksum: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub total_bars: usize,
    pub essential_bars: usize,
    pub max_finite_distance: f64,
    /// Ordered pairs of times at infinite barcode distance.
    pub infinite_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: StatisticId,
    pub value: f64,
    pub alpha: f64,
    /// `q_{1-α}` of the simulated limit law.
    pub quantile: f64,
    pub p_value_mc: f64,
    pub reject: bool,
    pub argmax: Option<Argmax>,
    /// Split points searched (Q only).
    pub k_range: Option<(usize, usize)>,
    pub trim: Option<f64>,
    pub skipped_radii: Vec<usize>,
    pub mc_params: McParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format_version: u32,
    pub config: AnalysisConfig,
    pub input: InputSummary,
    pub radius_grid: RadiusGrid,
    pub diagnostics: Diagnostics,
    pub tests: Vec<TestReport>,
    /// True when any selected statistic rejects.
    pub reject: bool,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
