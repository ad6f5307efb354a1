//! End-to-end analysis: clouds to diagrams to barcode distances to tests.

use std::path::Path;

use rayon::prelude::*;

use crate::change::{compute_statistic, DegeneratePolicy, KernelField, RadiusGrid, StatisticId};
use crate::error::{Error, Result};
use crate::geometry::{pairwise_distances, Metric, PointCloud};
use crate::metrics::{pairwise_bottleneck, BarcodeDistanceMatrix};
use crate::null_limits::{build_table, cache_file_name, cache_load, cache_store, McParams, QuantileTable};
use crate::persistence::{rips_diagrams, PersistenceDiagram, RipsConfig};
use crate::report::{AnalysisConfig, AnalysisReport, Diagnostics, InputSummary, TestReport, REPORT_FORMAT_VERSION};

/// Levels tabulated explicitly in freshly built tables.
pub const TABLE_ALPHAS: [f64; 3] = [0.01, 0.05, 0.1];

/// `PH_k` of the Rips filtration of every cloud, in time order.
pub fn series_diagrams(
    series: &[PointCloud],
    homology_dim: usize,
    rips_r_max: Option<f64>,
    simplex_budget: u64,
) -> Result<Vec<PersistenceDiagram>> {
    let mut config = RipsConfig::new(homology_dim).with_budget(simplex_budget);
    if let Some(r) = rips_r_max {
        config = config.with_r_max(r);
    }
    series
        .par_iter()
        .map(|cloud| {
            let d = pairwise_distances(cloud, &Metric::Euclidean)?;
            let mut dgms = rips_diagrams(&d, &config)?;
            Ok(dgms.swap_remove(homology_dim))
        })
        .enumerate()
        .map(|(i, r): (usize, Result<PersistenceDiagram>)| {
            r.map_err(|e| e.context(format!("t = {}", series[i].time_index())))
        })
        .collect()
}

/// Load a cached table or simulate and (if `cache_dir` is given) store it.
pub fn quantile_table(stat: StatisticId, params: McParams, cache_dir: Option<&Path>) -> Result<QuantileTable> {
    let path = cache_dir.map(|d| d.join(cache_file_name(stat, &params)));
    if let Some(p) = path.as_deref().filter(|p| p.exists()) {
        let table = cache_load(p)?;
        if table.statistic != stat || table.mc_params != params {
            return Err(Error::format(p, "cached table does not match its file name"));
        }
        return Ok(table);
    }
    let table = build_table(stat, params, &TABLE_ALPHAS)?;
    if let Some(p) = path {
        cache_store(&table, &p)?;
    }
    Ok(table)
}

/// One table per selected statistic, in the order of `config.statistics`.
pub fn prepare_tables(config: &AnalysisConfig, cache_dir: Option<&Path>) -> Result<Vec<QuantileTable>> {
    config
        .statistics
        .iter()
        .map(|&s| quantile_table(s, config.mc_params(s), cache_dir))
        .collect()
}

fn validate(config: &AnalysisConfig) -> Result<()> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::input(format!("alpha must lie in (0, 1), got {}", config.alpha)));
    }
    if config.statistics.is_empty() {
        return Err(Error::input("no statistics selected"));
    }
    Ok(())
}

/// Tests on an already computed barcode distance matrix.
pub fn analyze_distances(
    distances: BarcodeDistanceMatrix,
    config: &AnalysisConfig,
    tables: &[QuantileTable],
) -> Result<(RadiusGrid, Vec<TestReport>)> {
    validate(config)?;
    if distances.size() < 2 {
        return Err(Error::input(format!("need at least 2 time steps, got T = {}", distances.size())));
    }
    let grid = RadiusGrid::for_distances(&distances, config.grid_size, config.grid_r_max)?;
    let field = KernelField::new(distances, grid.clone())?;
    let policy = if config.skip_degenerate {
        DegeneratePolicy::Skip
    } else {
        DegeneratePolicy::Fail
    };
    let mut tests = Vec::with_capacity(config.statistics.len());
    for &stat in &config.statistics {
        let table = tables
            .iter()
            .find(|t| t.statistic == stat)
            .ok_or_else(|| Error::input(format!("no quantile table for {stat}")))?;
        let expected = config.mc_params(stat);
        if table.mc_params != expected {
            return Err(Error::input(format!(
                "quantile table for {stat} was built with {:?}, config asks for {expected:?}",
                table.mc_params
            )));
        }
        let value = compute_statistic(&field, stat, config.trim, policy)?;
        let quantile = table.quantile(config.alpha);
        tests.push(TestReport {
            statistic: stat,
            value: value.value,
            alpha: config.alpha,
            quantile,
            p_value_mc: table.p_value(value.value),
            reject: value.value > quantile,
            argmax: value.argmax,
            k_range: (stat == StatisticId::Q).then_some(value.k_range),
            trim: (stat == StatisticId::Q).then_some(config.trim),
            skipped_radii: value.skipped_radii,
            mc_params: table.mc_params,
        });
    }
    Ok((grid, tests))
}

/// Full pipeline from clouds to a report, using pre-built tables.
pub fn analyze_series(
    series: &[PointCloud],
    config: &AnalysisConfig,
    tables: &[QuantileTable],
) -> Result<AnalysisReport> {
    validate(config)?;
    if series.len() < 2 {
        return Err(Error::input(format!("need at least 2 time steps, got T = {}", series.len())));
    }
    let diagrams = series_diagrams(series, config.homology_dim, config.rips_r_max, config.simplex_budget)?;
    let distances = pairwise_bottleneck(&diagrams)?;
    let diagnostics = Diagnostics {
        total_bars: diagrams.iter().map(PersistenceDiagram::len).sum(),
        essential_bars: diagrams.iter().map(PersistenceDiagram::essential_count).sum(),
        max_finite_distance: distances.max_finite(),
        infinite_pairs: distances.infinite_count(),
    };
    let (radius_grid, tests) = analyze_distances(distances, config, tables)?;
    Ok(AnalysisReport {
        format_version: REPORT_FORMAT_VERSION,
        config: config.clone(),
        input: InputSummary {
            length: series.len(),
            counts: series.iter().map(PointCloud::len).collect(),
            dim: series[0].dim(),
            checksum: None,
        },
        radius_grid,
        diagnostics,
        reject: tests.iter().any(|t| t.reject),
        tests,
    })
}
