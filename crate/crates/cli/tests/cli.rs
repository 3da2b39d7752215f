use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coaltm::simulator::log_bias_correction;
use coaltm::{Configuration, MutationModel};
use tempfile::TempDir;

const GRID_HEADER: &str = "mu,ntm,mean_loglik,sd_loglik,mean_events,mean_wall_ms,n,repeats,seed";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_coaltm"));
    cmd.env_remove("TM_WORKERS");
    cmd
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn ok(output: Output) -> Output {
    assert!(
        output.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

/// Header and data rows, timestamp line dropped.
fn csv_body(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# generated "));
    lines.map(str::to_string).collect()
}

fn column(lines: &[String], name: &str) -> Vec<String> {
    let header: Vec<&str> = lines[0].split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines[1..]
        .iter()
        .map(|l| split_csv(l)[idx].clone())
        .collect()
}

fn split_csv(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(String::new()),
            _ => out.last_mut().unwrap().push(c),
        }
    }
    out
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const PDM_SMALL: &str = r#"{
    "model": {"mu": 2.0, "matrix": [[0.5, 0.5], [0.1, 0.9]]},
    "data": {"counts": [2, 4]},
    "tm_levels": [6],
    "replicates": 50,
    "repeats": 3
}"#;

#[test]
fn estimate_degenerate_stop_is_the_bias_term() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", PDM_SMALL);
    let out = dir.path().join("out");
    let stdout = ok(run("estimate", &cfg, &out, &[]));
    assert!(String::from_utf8_lossy(&stdout.stdout).contains("mean_loglik="));
    let lines = csv_body(&out.join("estimate.csv"));
    assert_eq!(lines[0], GRID_HEADER);
    assert_eq!(lines.len(), 2);
    let model = MutationModel::from_dense(2.0, &[vec![0.5, 0.5], vec![0.1, 0.9]]).unwrap();
    let b = log_bias_correction(&model, &Configuration::new(vec![2, 4]).unwrap()).unwrap();
    let got = num(&column(&lines, "mean_loglik")[0]);
    assert!((got - b).abs() <= 1e-11 * b.abs(), "{got} vs {b}");
    assert_eq!(column(&lines, "sd_loglik")[0], "0");
    let repeats = csv_body(&out.join("estimate_repeats.csv"));
    assert_eq!(repeats.len(), 4);
}

#[test]
fn estimate_rerun_is_byte_identical_after_line_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", PDM_SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(run("estimate", &cfg, &a, &["--ntm", "2", "--no-timing"]));
    ok(run("estimate", &cfg, &b, &["--ntm", "2", "--no-timing"]));
    for name in ["estimate.csv", "estimate_repeats.csv"] {
        assert_eq!(csv_body(&a.join(name)), csv_body(&b.join(name)), "{name}");
    }
    assert_eq!(column(&csv_body(&a.join("estimate.csv")), "mean_wall_ms")[0], "nan");
}

#[test]
fn estimate_needs_a_single_cell() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", PDM_SMALL);
    let out = run("estimate", &cfg, &dir.path().join("o"), &["--ntm", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_matrix_row_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &PDM_SMALL.replace("[0.1, 0.9]", "[0.1, 0.8]"));
    let out = run("estimate", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 1"), "{err}");
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("o");
    let broken = write_config(dir.path(), "broken.json", "{ \"model\": ");
    assert_eq!(run("grid", &broken, &out_dir, &[]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(run("grid", &missing, &out_dir, &[]).status.code(), Some(1));
    let cfg = write_config(dir.path(), "c.json", PDM_SMALL);
    assert_eq!(run("grid", &cfg, &out_dir, &["--ntm", "7"]).status.code(), Some(1));
    assert_eq!(run("grid", &cfg, &out_dir, &["--mu-grid", "0:3:4"]).status.code(), Some(1));
    assert_eq!(bin().arg("grid").arg("--bogus").output().unwrap().status.code(), Some(1));
}

#[test]
fn oracle_capacity_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &PDM_SMALL.replace("\"counts\": [2, 4]", "\"counts\": [7, 7]").replace("[6]", "[3]"),
    );
    let out = run("oracle", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("limit is 12"), "{err}");
}

#[test]
fn grid_rows_plots_and_schema() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", PDM_SMALL);
    let out = dir.path().join("o");
    ok(run("grid", &cfg, &out, &["--mu-grid", "0.5:6:12", "--ntm", "1,3,6"]));
    let lines = csv_body(&out.join("grid.csv"));
    assert_eq!(lines[0], GRID_HEADER);
    assert_eq!(lines.len(), 37);
    assert!(!out.join("grid_loglik.svg").exists());
    assert!(!out.join("grid_events.svg").exists());

    let plotted = dir.path().join("p");
    ok(run("grid", &cfg, &plotted, &["--mu-grid", "0.5:6:12", "--ntm", "1,3,6", "--plot"]));
    for name in ["grid_loglik.svg", "grid_events.svg"] {
        let svg = std::fs::read_to_string(plotted.join(name)).unwrap();
        assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 3, "{name}");
    }
}

#[test]
fn grid_is_identical_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{
            "model": {"mu": 1.0, "matrix": [[0.5, 0.5], [0.1, 0.9]]},
            "mu_grid": {"start": 0.5, "stop": 9.5, "count": 4},
            "data": {"generate": {"n": 20, "seed": 5}},
            "tm_levels": [1, 4, 10],
            "replicates": 400,
            "repeats": 3
        }"#,
    );
    let mut bodies = Vec::new();
    for workers in ["1", "4", "8"] {
        let out = dir.path().join(format!("w{workers}"));
        ok(run("grid", &cfg, &out, &["--workers", workers, "--no-timing"]));
        bodies.push(csv_body(&out.join("grid.csv")));
    }
    // the environment default goes through the same path
    let out = dir.path().join("env");
    ok(bin()
        .env("TM_WORKERS", "3")
        .args(["grid", "--no-timing", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    bodies.push(csv_body(&out.join("grid.csv")));
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn oracle_examples() {
    let dir = TempDir::new().unwrap();
    let pim = write_config(
        dir.path(),
        "pim.json",
        r#"{
            "model": {"mu": 1.0, "matrix": [[0.5, 0.5], [0.5, 0.5]]},
            "data": {"counts": [2, 0]},
            "tm_levels": [1, 2],
            "replicates": 1,
            "repeats": 1
        }"#,
    );
    let out = dir.path().join("pim");
    ok(run("oracle", &pim, &out, &[]));
    let lines = csv_body(&out.join("oracle.csv"));
    assert!(column(&lines, "likelihood").iter().all(|v| num(v) == 0.375));
    let levels = csv_body(&out.join("oracle_levels.csv"));
    assert_eq!(levels[0], "mu,kind,m,configuration,probability");
    assert_eq!(levels.len(), 7);

    let pdm = write_config(
        dir.path(),
        "pdm.json",
        r#"{
            "model": {"mu": 1.0, "matrix": [[0.5, 0.5], [0.1, 0.9]]},
            "mu_values": [0.5, 1.0, 10.0],
            "data": {"counts": [3, 5]},
            "tm_levels": [1],
            "replicates": 1,
            "repeats": 1,
            "oracle": {"m": [2, 3, 4, 5, 6, 7, 8], "h": "exact"}
        }"#,
    );
    let out = dir.path().join("pdm");
    ok(run("oracle", &pdm, &out, &[]));
    let lines = csv_body(&out.join("oracle.csv"));
    assert_eq!(lines.len(), 22);
    assert!(column(&lines, "bias_gap").iter().all(|v| num(v) <= 1e-12), "{lines:?}");

    let one = write_config(
        dir.path(),
        "one.json",
        r#"{
            "model": {"mu": 0.7, "matrix": [[1.0]]},
            "data": {"counts": [5]},
            "tm_levels": [1, 3],
            "replicates": 1,
            "repeats": 1
        }"#,
    );
    let out = dir.path().join("one");
    ok(run("oracle", &one, &out, &[]));
    let lines = csv_body(&out.join("oracle.csv"));
    for (l, gap) in column(&lines, "likelihood").iter().zip(column(&lines, "bias_gap")) {
        assert!((num(l) - 1.0).abs() < 1e-12 && num(&gap) < 1e-12);
    }
}

#[test]
fn compare_report_targets_and_z_scores() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{
            "model": {"mu": 1.0, "matrix": [[0.5, 0.5], [0.1, 0.9]]},
            "mu_values": [0.5, 5.0],
            "data": {"counts": [2, 4]},
            "tm_levels": [1, 3, 4, 6],
            "replicates": 20000,
            "repeats": 5
        }"#,
    );
    let out = dir.path().join("o");
    ok(run("compare", &cfg, &out, &[]));
    let lines = csv_body(&out.join("compare.csv"));
    assert_eq!(lines.len(), 9);
    let ntm = column(&lines, "ntm");
    let target = column(&lines, "target");
    let l = column(&lines, "oracle_l");
    let lb = column(&lines, "oracle_lb");
    for k in 0..ntm.len() {
        let want = if ntm[k] == "1" { &l[k] } else { &lb[k] };
        assert_eq!(&target[k], want);
    }
    for z in column(&lines, "z") {
        assert!(num(&z).abs() <= 3.0, "z = {z}");
    }
    let events: Vec<f64> = column(&lines, "mean_events").iter().map(|v| num(v)).collect();
    for block in events.chunks(4) {
        assert!(block.windows(2).all(|w| w[1] <= w[0]), "{block:?}");
    }
    for r in column(&lines, "sd_ratio") {
        assert!(num(&r).is_finite());
    }
}

#[test]
fn desk_scale_grid_trend() {
    // shipped PDM desk configuration: n=30, 12-point grid, TM {1,2,3,8}
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/pdm_desk.json");
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    ok(run("grid", &config, &out, &["--no-timing"]));
    let lines = csv_body(&out.join("grid.csv"));
    assert_eq!(lines.len(), 49);
    let ntm = column(&lines, "ntm");
    let ll: Vec<f64> = column(&lines, "mean_loglik").iter().map(|v| num(v)).collect();
    let curve = |level: &str| -> Vec<f64> {
        ntm.iter().zip(&ll).filter(|(t, _)| *t == level).map(|(_, v)| *v).collect()
    };
    let sd = curve("1");
    let max_gap = |level: &str| {
        curve(level)
            .iter()
            .zip(&sd)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let (g2, g3, g8) = (max_gap("2"), max_gap("3"), max_gap("8"));
    assert!(g2 < g8 && g3 < g8, "gaps TM2 {g2}, TM3 {g3}, TM8 {g8}");
}
