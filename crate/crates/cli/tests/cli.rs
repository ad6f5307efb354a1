use std::path::Path;
use std::process::{Command, Output};

fn topocp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topocp"))
        .args(args)
        .env_remove("TOPOCP_CACHE_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn simulate(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    topocp(&args)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--scenario", "stationary_circle", "--length", "10", "--points", "20", "--seed", "1", "--noise-sd", "0.05"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = simulate(&a, &args);
    assert_eq!(code(&first), 0, "{}", text(&first.stderr));
    assert_eq!(code(&simulate(&b, &args)), 0);
    let files = dir_bytes(&a);
    assert_eq!(files.iter().filter(|(n, _)| n.starts_with("t_")).count(), 10);
    assert_eq!(files, dir_bytes(&b));
    assert!(text(&first.stdout).contains("sha256="));
}

#[test]
fn negative_magnitude_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = simulate(
        &tmp.path().join("s"),
        &["--scenario", "abrupt_bifurcation", "--length", "10", "--points", "10", "--magnitude", "-1"],
    );
    assert_eq!(code(&o), 1);
    assert!(text(&o.stderr).contains("error"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&topocp(&["simulate", "--no-such-flag"])), 1);
    assert_eq!(code(&topocp(&["--jobs", "0", "quantiles", "--statistic", "Dmax", "--out", "x.json"])), 1);
    assert_eq!(code(&topocp(&["quantiles", "--statistic", "Nope", "--out", "x.json"])), 1);
    assert_eq!(code(&topocp(&["--help"])), 0);
}

#[test]
fn single_time_step_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("one.jsonl");
    std::fs::write(&f, "{\"t\":1,\"points\":[[0,0],[1,0],[0,1]]}\n").unwrap();
    let o = topocp(&["analyze", "--input", f.to_str().unwrap(), "--mc-paths", "1000", "--mc-grid", "100"]);
    assert_eq!(code(&o), 1);
    assert!(text(&o.stderr).contains("T = 1"), "{}", text(&o.stderr));
}

#[test]
fn persistence_writes_one_diagram_per_step() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s.jsonl");
    simulate(&s, &["--scenario", "stationary_circle", "--length", "5", "--points", "15", "--noise-sd", "0.05", "--format", "jsonl"]);
    let out = tmp.path().join("dgm");
    let o = topocp(&["persistence", "--input", s.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert!(out.join("diagrams.json").exists());

    let o = topocp(&["persistence", "--input", s.to_str().unwrap(), "--out", out.to_str().unwrap(), "--k", "2", "--simplex-budget", "10"]);
    assert_eq!(code(&o), 1);
    let err = text(&o.stderr);
    assert!(err.contains("10") && err.contains("t = 1"), "{err}");
}

#[test]
fn quantiles_write_a_loadable_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("q.json");
    let o = topocp(&["quantiles", "--statistic", "Q", "--mc-paths", "1000", "--mc-grid", "100", "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let table = topocp_core::null_limits::cache_load(&out).unwrap();
    assert_eq!(table.mc_params.paths, 1000);
    assert_eq!(table.mc_params.trim, Some(0.05));
    assert!(text(&o.stdout).contains("mc M=1000 N=100 seed=4"));
}

fn analyze(series: &Path, report: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "analyze", "--input", series.to_str().unwrap(), "--out", report.to_str().unwrap(),
        "--mc-paths", "2000", "--mc-grid", "200", "--seed", "11",
    ];
    args.extend_from_slice(extra);
    topocp(&args)
}

#[test]
fn stationary_series_is_not_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    simulate(&s, &["--scenario", "stationary_circle", "--length", "40", "--points", "30", "--seed", "3", "--noise-sd", "0.05", "--sampling", "iid_uniform"]);
    let r = tmp.path().join("r.json");
    // Q is oversized at this length, so the size check uses the other two.
    let o = analyze(&s, &r, &["--statistics", "Dmax,DL"]);
    let out = text(&o.stdout);
    assert_eq!(code(&o), 0, "{out}{}", text(&o.stderr));
    assert_eq!(out.lines().count(), 2);
    for line in out.lines() {
        assert!(line.contains("reject=false") && line.contains("grid R=") && line.contains("r_max="), "{line}");
        assert!(line.contains("mc M=2000 N=200 seed=11"), "{line}");
    }
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&r).unwrap()).unwrap();
    assert_eq!(report["reject"], false);
}

#[test]
fn bifurcation_is_rejected_with_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s.jsonl");
    simulate(&s, &["--scenario", "abrupt_bifurcation", "--length", "60", "--points", "30", "--seed", "2", "--magnitude", "3", "--noise-sd", "0.05", "--format", "jsonl"]);
    let r = tmp.path().join("r.json");
    let surface = tmp.path().join("surface.csv");
    let o = analyze(&s, &r, &["--surface-csv", surface.to_str().unwrap(), "--statistics", "Q"]);
    assert_eq!(code(&o), 2, "{}{}", text(&o.stdout), text(&o.stderr));
    assert!(text(&o.stdout).lines().all(|l| l.contains("reject=true")));
    assert!(std::fs::read_to_string(&surface).unwrap().starts_with("u,r,"));
}

#[test]
fn config_file_supplies_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    let out = tmp.path().join("s");
    std::fs::write(
        &cfg,
        format!("scenario = \"gradual_drift\"\nlength = 4\npoints = 8\nmagnitude = 0.5\nout = {:?}\n", out.to_str().unwrap()),
    )
    .unwrap();
    let o = topocp(&["--config", cfg.to_str().unwrap(), "simulate", "--length", "6"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert_eq!(dir_bytes(&out).iter().filter(|(n, _)| n.starts_with("t_")).count(), 6);
}
