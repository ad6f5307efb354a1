//! Optional TOML configuration file. Every key mirrors a command-line flag
//! (with `-` written as `_`); flags given on the command line win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub input: Option<PathBuf>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,

    pub k: Option<usize>,
    pub rmax: Option<f64>,
    pub simplex_budget: Option<u64>,

    #[serde(rename = "grid_R")]
    pub grid_r: Option<usize>,
    pub grid_rmax: Option<f64>,
    pub statistics: Option<Vec<String>>,
    pub alpha: Option<f64>,
    pub trim: Option<f64>,
    pub mc_paths: Option<usize>,
    pub mc_grid: Option<usize>,
    pub mc_seed: Option<u64>,
    pub skip_degenerate: Option<bool>,
    pub surface_csv: Option<PathBuf>,
    pub distances_csv: Option<PathBuf>,

    pub scenario: Option<String>,
    pub length: Option<usize>,
    pub points: Option<usize>,
    pub noise_sd: Option<f64>,
    pub ma_weights: Option<Vec<f64>>,
    pub change_u: Option<f64>,
    pub magnitude: Option<f64>,
    pub base_radius: Option<f64>,
    pub sampling: Option<String>,

    pub statistic: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}
