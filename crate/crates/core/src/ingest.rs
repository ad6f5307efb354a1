//! Reading and writing point-cloud series, diagrams and reports.
//!
//! Reals are written as decimal text with 17 significant digits, which
//! round-trips every finite `f64`; `inf` stands for `+∞`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::persistence::PersistenceDiagram;
use crate::report::{AnalysisReport, REPORT_FORMAT_VERSION};

pub const SERIES_FORMAT_VERSION: u32 = 1;
pub const DIAGRAM_FORMAT_VERSION: u32 = 1;

pub fn format_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_real(s: &str) -> Result<f64> {
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::input(format!("not a number: '{s}'"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFormat {
    /// A directory of `t_<index>.csv` files, one point per row.
    CsvDir,
    /// One `{"t": .., "points": [[..], ..]}` object per line.
    Jsonl,
}

impl std::str::FromStr for SeriesFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv_dir" | "csv" => Ok(SeriesFormat::CsvDir),
            "jsonl" => Ok(SeriesFormat::Jsonl),
            _ => Err(Error::input(format!("unknown series format '{s}'"))),
        }
    }
}

impl SeriesFormat {
    /// `jsonl` for regular files, `csv_dir` for directories.
    pub fn detect(path: &Path) -> Self {
        if path.is_dir() {
            SeriesFormat::CsvDir
        } else {
            SeriesFormat::Jsonl
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesManifest {
    pub format: SeriesFormat,
    pub length: usize,
    pub counts: Vec<usize>,
    pub dim: usize,
    pub sources: Vec<PathBuf>,
    /// SHA-256 over the raw bytes of the sources, in time order.
    pub checksum: String,
}

impl SeriesManifest {
    fn build(
        format: SeriesFormat,
        clouds: &[PointCloud],
        sources: Vec<PathBuf>,
        raw: &[Vec<u8>],
    ) -> Self {
        let mut hasher = Sha256::new();
        for bytes in raw {
            hasher.update(bytes);
        }
        Self {
            format,
            length: clouds.len(),
            counts: clouds.iter().map(PointCloud::len).collect(),
            dim: clouds[0].dim(),
            sources,
            checksum: hex::encode(hasher.finalize()),
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_index(name: &str) -> Option<usize> {
    name.strip_prefix("t_")?.strip_suffix(".csv")?.parse().ok()
}

fn parse_csv_cloud(path: &Path, text: &str, t: usize) -> Result<PointCloud> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                let x = parse_real(f.trim()).map_err(|e| Error::format(path, format!("line {line_no}: {e}")))?;
                if !x.is_finite() {
                    return Err(Error::format(path, format!("line {line_no}: non-finite value '{}'", f.trim())));
                }
                Ok(x)
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = points.first() {
            if first.len() != row.len() {
                return Err(Error::format(
                    path,
                    format!("line {line_no}: ragged row with {} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::format(path, "no points"));
    }
    PointCloud::new(t, points).map_err(|e| e.context(path.display().to_string()))
}

fn check_dims(clouds: &[PointCloud], sources: &[PathBuf]) -> Result<()> {
    let dim = clouds[0].dim();
    for (c, src) in clouds.iter().zip(sources) {
        if c.dim() != dim {
            return Err(Error::format(
                src,
                format!("t = {}: ambient dimension {} differs from {dim}", c.time_index(), c.dim()),
            ));
        }
    }
    Ok(())
}

fn load_csv_dir(dir: &Path) -> Result<(Vec<PointCloud>, SeriesManifest)> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<(usize, PathBuf)> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        if let Some(t) = name.to_str().and_then(csv_index) {
            files.push((t, entry.path()));
        }
    }
    if files.is_empty() {
        return Err(Error::format(dir, "no time steps"));
    }
    files.sort();
    for w in files.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::format(&w[1].1, format!("duplicate t = {}", w[0].0)));
        }
    }
    for (expected, (t, path)) in (1..).zip(&files) {
        if *t != expected {
            return Err(Error::format(path, format!("missing index t = {expected}")));
        }
    }
    let mut clouds = Vec::with_capacity(files.len());
    let mut raw = Vec::with_capacity(files.len());
    for (t, path) in &files {
        let bytes = read_bytes(path)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::format(path, e.to_string()))?;
        clouds.push(parse_csv_cloud(path, text, *t)?);
        raw.push(bytes);
    }
    let sources: Vec<PathBuf> = files.into_iter().map(|(_, p)| p).collect();
    check_dims(&clouds, &sources)?;
    let manifest = SeriesManifest::build(SeriesFormat::CsvDir, &clouds, sources, &raw);
    Ok((clouds, manifest))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlRecord {
    t: usize,
    points: Vec<Vec<f64>>,
}

fn load_jsonl(path: &Path) -> Result<(Vec<PointCloud>, SeriesManifest)> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::format(path, e.to_string()))?;
    let mut records: Vec<(JsonlRecord, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord = serde_json::from_str(line)
            .map_err(|e| Error::format(path, format!("line {line_no}: {e}")))?;
        if let Some(first) = rec.points.first() {
            if let Some(bad) = rec.points.iter().position(|p| p.len() != first.len()) {
                return Err(Error::format(
                    path,
                    format!("line {line_no}: ragged row {} in t = {}", bad + 1, rec.t),
                ));
            }
        }
        records.push((rec, line_no));
    }
    if records.is_empty() {
        return Err(Error::format(path, "no time steps"));
    }
    records.sort_by_key(|(r, _)| r.t);
    for w in records.windows(2) {
        if w[0].0.t == w[1].0.t {
            return Err(Error::format(path, format!("line {}: duplicate t = {}", w[1].1, w[1].0.t)));
        }
    }
    for (expected, (rec, line_no)) in (1..).zip(&records) {
        if rec.t != expected {
            return Err(Error::format(path, format!("line {line_no}: missing index t = {expected}")));
        }
    }
    let clouds = records
        .into_iter()
        .map(|(rec, line_no)| {
            PointCloud::new(rec.t, rec.points)
                .map_err(|e| e.context(format!("{} line {line_no}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let sources = vec![path.to_path_buf(); clouds.len()];
    check_dims(&clouds, &sources)?;
    let manifest = SeriesManifest::build(SeriesFormat::Jsonl, &clouds, vec![path.to_path_buf()], &[bytes]);
    Ok((clouds, manifest))
}

/// Load a series; time indices must be exactly `1..=T`.
pub fn load_series(path: &Path, format: SeriesFormat) -> Result<(Vec<PointCloud>, SeriesManifest)> {
    match format {
        SeriesFormat::CsvDir => load_csv_dir(path),
        SeriesFormat::Jsonl => load_jsonl(path),
    }
}

fn cloud_csv(cloud: &PointCloud) -> String {
    let mut out = format!("# format_version {SERIES_FORMAT_VERSION}\n");
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|x| format_real(*x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write `series` so that [`load_series`] reproduces it bit for bit.
/// Times are renumbered `1..=T` in the given order.
pub fn save_series(series: &[PointCloud], path: &Path, format: SeriesFormat) -> Result<SeriesManifest> {
    if series.is_empty() {
        return Err(Error::input("cannot save an empty series"));
    }
    let mut raw = Vec::with_capacity(series.len());
    let mut sources = Vec::new();
    match format {
        SeriesFormat::CsvDir => {
            std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))?;
            for (i, cloud) in series.iter().enumerate() {
                let file = path.join(format!("t_{}.csv", i + 1));
                let text = cloud_csv(cloud);
                write_text(&file, &text)?;
                raw.push(text.into_bytes());
                sources.push(file);
            }
        }
        SeriesFormat::Jsonl => {
            let mut text = String::new();
            for (i, cloud) in series.iter().enumerate() {
                let rec = JsonlRecord {
                    t: i + 1,
                    points: cloud.points().to_vec(),
                };
                text.push_str(&serde_json::to_string(&rec).expect("finite points serialize"));
                text.push('\n');
            }
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            write_text(path, &text)?;
            raw.push(text.into_bytes());
            sources.push(path.to_path_buf());
        }
    }
    let renumbered: Vec<PointCloud> = series
        .iter()
        .enumerate()
        .map(|(i, c)| PointCloud::new(i + 1, c.points().to_vec()))
        .collect::<Result<_>>()?;
    Ok(SeriesManifest::build(format, &renumbered, sources, &raw))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramFile {
    pub format_version: u32,
    pub t: usize,
    pub diagram: PersistenceDiagram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSeriesFile {
    pub format_version: u32,
    pub homology_dim: usize,
    pub diagrams: Vec<PersistenceDiagram>,
}

/// Writes `diagram_t<index>.json` per time step plus `diagrams.json`.
pub fn save_diagrams(diagrams: &[PersistenceDiagram], homology_dim: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(diagrams.len() + 1);
    for (i, diagram) in diagrams.iter().enumerate() {
        let file = dir.join(format!("diagram_t{}.json", i + 1));
        let body = DiagramFile {
            format_version: DIAGRAM_FORMAT_VERSION,
            t: i + 1,
            diagram: diagram.clone(),
        };
        write_text(&file, &serde_json::to_string(&body).expect("diagrams serialize"))?;
        written.push(file);
    }
    let combined = dir.join("diagrams.json");
    let body = DiagramSeriesFile {
        format_version: DIAGRAM_FORMAT_VERSION,
        homology_dim,
        diagrams: diagrams.to_vec(),
    };
    write_text(&combined, &serde_json::to_string(&body).expect("diagrams serialize"))?;
    written.push(combined);
    Ok(written)
}

fn check_version(path: &Path, value: &serde_json::Value, expected: u32) -> Result<()> {
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::format(path, "missing format_version"))?;
    if found != u64::from(expected) {
        return Err(Error::Version {
            path: path.to_path_buf(),
            found: found as u32,
            expected,
        });
    }
    Ok(())
}

fn load_versioned<T: serde::de::DeserializeOwned>(path: &Path, expected: u32) -> Result<T> {
    let bytes = read_bytes(path)?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| Error::format(path, e.to_string()))?;
    check_version(path, &value, expected)?;
    serde_json::from_value(value).map_err(|e| Error::format(path, e.to_string()))
}

/// Load a combined `diagrams.json`.
pub fn load_diagrams(path: &Path) -> Result<DiagramSeriesFile> {
    load_versioned(path, DIAGRAM_FORMAT_VERSION)
}

pub fn save_report(report: &AnalysisReport, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    write_text(path, &report.to_json())
}

pub fn load_report(path: &Path) -> Result<AnalysisReport> {
    load_versioned(path, REPORT_FORMAT_VERSION)
}
