use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use topocp_core::change::{surface_csv, KernelField, RadiusGrid, StatisticId};
use topocp_core::ingest::{load_series, save_diagrams, save_report, save_series, SeriesFormat};
use topocp_core::metrics::pairwise_bottleneck;
use topocp_core::null_limits::{self, cache_store, McParams};
use topocp_core::pipeline::{analyze_series, prepare_tables, series_diagrams, TABLE_ALPHAS};
use topocp_core::procgen::{generate_series, ProcessConfig};
use topocp_core::report::{AnalysisConfig, AnalysisReport};

mod config;

use config::FileConfig;

const CACHE_ENV: &str = "TOPOCP_CACHE_DIR";

#[derive(Parser)]
#[command(name = "topocp", version, about = "Topological change-point tests for point-cloud time series")]
struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic series of point clouds.
    Simulate(SimulateArgs),
    /// Compute one persistence diagram per time step.
    Persistence(PersistenceArgs),
    /// Run the change-point tests and write a report.
    Analyze(AnalyzeArgs),
    /// Simulate and store a quantile table of a limit law.
    Quantiles(QuantilesArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Series directory (`t_<index>.csv`) or JSON-lines file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// `csv_dir` or `jsonl`; guessed from the path when omitted.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: Option<String>,
    /// Series length T.
    #[arg(long)]
    length: Option<usize>,
    /// Points per cloud.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise_sd: Option<f64>,
    /// Comma-separated moving-average weights.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ma_weights: Option<Vec<f64>>,
    #[arg(long)]
    change_u: Option<f64>,
    /// Change size Δ.
    #[arg(long, allow_negative_numbers = true)]
    magnitude: Option<f64>,
    #[arg(long)]
    base_radius: Option<f64>,
    /// `uniform_angles`, `iid_uniform` or `farthest_point`.
    #[arg(long)]
    sampling: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PersistenceArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Homology dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Truncate the Rips filtration at this scale.
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    simplex_budget: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    simplex_budget: Option<u64>,
    /// Number of radii R in the kernel grid.
    #[arg(long = "grid-R")]
    grid_r: Option<usize>,
    /// Largest kernel radius (default: largest finite barcode distance).
    #[arg(long)]
    grid_rmax: Option<f64>,
    /// Comma-separated subset of Dmax, DL, Q.
    #[arg(long, value_delimiter = ',')]
    statistics: Option<Vec<String>>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Trim of the split-point range for Q.
    #[arg(long)]
    trim: Option<f64>,
    #[arg(long)]
    mc_paths: Option<usize>,
    #[arg(long)]
    mc_grid: Option<usize>,
    /// Seed of the Monte Carlo quantile tables.
    #[arg(long)]
    seed: Option<u64>,
    /// Skip radii whose normalizer vanishes instead of failing.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    skip_degenerate: Option<bool>,
    /// Report path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the surface (u, r, U) as CSV.
    #[arg(long)]
    surface_csv: Option<PathBuf>,
    /// Also write the barcode distance matrix as CSV.
    #[arg(long)]
    distances_csv: Option<PathBuf>,
}

#[derive(Args)]
struct QuantilesArgs {
    /// Dmax, DL or Q.
    #[arg(long)]
    statistic: Option<String>,
    #[arg(long)]
    mc_paths: Option<usize>,
    #[arg(long)]
    mc_grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trim: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

type CliResult<T> = Result<T, String>;

fn core<T>(r: topocp_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| e.to_string())
}

fn required<T>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| format!("missing required option --{name}"))
}

fn series_format(path: &Path, format: Option<String>) -> CliResult<SeriesFormat> {
    match format {
        Some(f) => core(f.parse()),
        None => Ok(SeriesFormat::detect(path)),
    }
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn simulate(args: SimulateArgs, file: FileConfig) -> CliResult<bool> {
    let scenario = required(args.scenario.or(file.scenario), "scenario")?;
    let mut config = ProcessConfig::new(
        core(scenario.parse())?,
        required(args.length.or(file.length), "length")?,
        required(args.points.or(file.points), "points")?,
        args.seed.or(file.seed).unwrap_or(0),
    );
    if let Some(v) = args.noise_sd.or(file.noise_sd) {
        config.noise_sd = v;
    }
    if let Some(v) = args.ma_weights.or(file.ma_weights) {
        config.ma_weights = v;
    }
    if let Some(v) = args.change_u.or(file.change_u) {
        config.change_u = v;
    }
    if let Some(v) = args.magnitude.or(file.magnitude) {
        config.magnitude = v;
    }
    if let Some(v) = args.base_radius.or(file.base_radius) {
        config.base_radius = v;
    }
    if let Some(v) = args.sampling.or(file.sampling) {
        config.sampling = core(v.parse())?;
    }
    let out = required(args.out.or(file.out), "out")?;
    let format = match args.format.or(file.format) {
        Some(f) => core(f.parse())?,
        None => SeriesFormat::CsvDir,
    };
    let series = core(generate_series(&config))?;
    let manifest = core(save_series(&series, &out, format))?;
    println!(
        "wrote T={} clouds of {} points (dim {}) to {} sha256={}",
        manifest.length,
        config.points,
        manifest.dim,
        out.display(),
        manifest.checksum
    );
    Ok(false)
}

fn persistence(args: PersistenceArgs, file: FileConfig) -> CliResult<bool> {
    let input = required(args.input.input.or(file.input), "input")?;
    let format = series_format(&input, args.input.format.or(file.format))?;
    let out = required(args.out.or(file.out), "out")?;
    let k = args.k.or(file.k).unwrap_or(1);
    let (series, _) = core(load_series(&input, format))?;
    let budget = args
        .simplex_budget
        .or(file.simplex_budget)
        .unwrap_or(topocp_core::persistence::DEFAULT_SIMPLEX_BUDGET);
    let diagrams = core(series_diagrams(&series, k, args.rmax.or(file.rmax), budget))?;
    core(save_diagrams(&diagrams, k, &out))?;
    println!("wrote {} diagrams (H{k}) to {}", diagrams.len(), out.display());
    Ok(false)
}

fn parse_statistics(names: Vec<String>) -> CliResult<Vec<StatisticId>> {
    let mut out: Vec<StatisticId> = Vec::new();
    for n in names {
        let id: StatisticId = core(n.trim().parse())?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    Ok(out)
}

fn print_summary(report: &AnalysisReport) {
    let grid = &report.radius_grid;
    for t in &report.tests {
        let trim = t.trim.map(|e| format!(" trim={e}")).unwrap_or_default();
        println!(
            "{} value={} q{}={} p_mc={} reject={} | grid R={} r_max={}{trim} | mc M={} N={} seed={}",
            t.statistic,
            t.value,
            1.0 - t.alpha,
            t.quantile,
            t.p_value_mc,
            t.reject,
            grid.len(),
            grid.r_max(),
            t.mc_params.paths,
            t.mc_params.grid,
            t.mc_params.seed,
        );
    }
}

fn analyze(args: AnalyzeArgs, file: FileConfig) -> CliResult<bool> {
    let input = required(args.input.input.or(file.input), "input")?;
    let format = series_format(&input, args.input.format.or(file.format))?;
    let defaults = AnalysisConfig::default();
    let statistics = match args.statistics.or(file.statistics) {
        Some(names) => parse_statistics(names)?,
        None => defaults.statistics.clone(),
    };
    let config = AnalysisConfig {
        homology_dim: args.k.or(file.k).unwrap_or(defaults.homology_dim),
        rips_r_max: args.rmax.or(file.rmax),
        grid_size: args.grid_r.or(file.grid_r),
        grid_r_max: args.grid_rmax.or(file.grid_rmax),
        statistics,
        alpha: args.alpha.or(file.alpha).unwrap_or(defaults.alpha),
        trim: args.trim.or(file.trim).unwrap_or(defaults.trim),
        mc_paths: args.mc_paths.or(file.mc_paths).unwrap_or(defaults.mc_paths),
        mc_grid: args.mc_grid.or(file.mc_grid).unwrap_or(defaults.mc_grid),
        mc_seed: args.seed.or(file.mc_seed).or(file.seed).unwrap_or(defaults.mc_seed),
        skip_degenerate: args
            .skip_degenerate
            .or(file.skip_degenerate)
            .unwrap_or(defaults.skip_degenerate),
        simplex_budget: args
            .simplex_budget
            .or(file.simplex_budget)
            .unwrap_or(defaults.simplex_budget),
    };
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(format!("alpha must lie in (0, 1), got {}", config.alpha));
    }
    if config.statistics.is_empty() {
        return Err("no statistics selected".into());
    }

    let (series, manifest) = core(load_series(&input, format))?;
    if series.len() < 2 {
        return Err(format!("invalid input: need at least 2 time steps, got T = {}", series.len()));
    }
    let cache = cache_dir();
    for &s in &config.statistics {
        let p = config.mc_params(s);
        eprintln!(
            "quantile table {s}: M={} N={} seed={}{}",
            p.paths,
            p.grid,
            p.seed,
            cache
                .as_ref()
                .map(|d| format!(" (cache {})", d.display()))
                .unwrap_or_default()
        );
    }
    let tables = core(prepare_tables(&config, cache.as_deref()))?;
    let mut report = core(analyze_series(&series, &config, &tables))?;
    report.input.checksum = Some(manifest.checksum);

    let surface = args.surface_csv.or(file.surface_csv);
    let distances_out = args.distances_csv.or(file.distances_csv);
    if surface.is_some() || distances_out.is_some() {
        let diagrams = core(series_diagrams(
            &series,
            config.homology_dim,
            config.rips_r_max,
            config.simplex_budget,
        ))?;
        let d = core(pairwise_bottleneck(&diagrams))?;
        if let Some(path) = distances_out {
            std::fs::write(&path, d.to_csv()).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        if let Some(path) = surface {
            let grid: RadiusGrid = report.radius_grid.clone();
            let field = core(KernelField::new(d, grid))?;
            std::fs::write(&path, surface_csv(&field)).map_err(|e| format!("{}: {e}", path.display()))?;
        }
    }

    match args.out.or(file.out) {
        Some(path) => {
            core(save_report(&report, &path))?;
            print_summary(&report);
        }
        None => print!("{}", report.to_json()),
    }
    Ok(report.reject)
}

fn quantiles(args: QuantilesArgs, file: FileConfig) -> CliResult<bool> {
    let stat: StatisticId = core(required(args.statistic.or(file.statistic), "statistic")?.parse())?;
    let mut params = McParams::new(
        args.mc_paths.or(file.mc_paths).unwrap_or(null_limits::DEFAULT_PATHS),
        args.mc_grid.or(file.mc_grid).unwrap_or(null_limits::DEFAULT_GRID),
        args.seed.or(file.mc_seed).or(file.seed).unwrap_or(0),
    );
    if stat == StatisticId::Q {
        params = params.with_trim(args.trim.or(file.trim).unwrap_or(AnalysisConfig::default().trim));
    }
    let out = match args.out.or(file.out) {
        Some(p) => p,
        None => match cache_dir() {
            Some(d) => d.join(null_limits::cache_file_name(stat, &params)),
            None => return Err(format!("missing --out and {CACHE_ENV} is not set")),
        },
    };
    let table = core(null_limits::build_table(stat, params, &TABLE_ALPHAS))?;
    core(cache_store(&table, &out))?;
    for (a, q) in table.alphas.iter().zip(&table.quantiles) {
        println!(
            "{stat} q{}={q} | mc M={} N={} seed={}",
            1.0 - a,
            params.paths,
            params.grid,
            params.seed
        );
    }
    Ok(false)
}

fn run(cli: Cli) -> CliResult<bool> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let jobs = cli.jobs.or(file.jobs);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err("--jobs must be at least 1".into());
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    pool.install(|| match cli.command {
        Command::Simulate(a) => simulate(a, file),
        Command::Persistence(a) => persistence(a, file),
        Command::Analyze(a) => analyze(a, file),
        Command::Quantiles(a) => quantiles(a, file),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
