use std::path::Path;
use std::process::{Command, Output};

fn ohhc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ohhc"))
        .args(args)
        .env_remove("OHHC_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn run_writes_versioned_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = ohhc(&[
        "run", "--dimension", "1", "--mode", "full", "--dist", "sorted", "--count", "100000",
        "--seed", "7", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["simulation"]["comm_steps_total"], 70);
    assert_eq!(v["simulation"]["gather_units_at_master"], 36);
    assert_eq!(v["output_matches_baseline"], true);
    assert_eq!(v["config"]["distribution"], "sorted");
}

#[test]
fn dimension_zero_is_a_usage_error() {
    let o = ohhc(&["run", "--dimension", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension"));
}

#[test]
fn bad_enum_values_are_rejected() {
    assert!(!ohhc(&["run", "--dimension", "1", "--mode", "quarter"]).status.success());
    assert!(!ohhc(&["run", "--dimension", "1", "--dist", "gaussian"]).status.success());
    assert!(!ohhc(&["run", "--dimension", "1", "--engine", "fast"]).status.success());
}

#[test]
fn csv_format_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let trace = dir.path().join("trace.txt");
    let o = ohhc(&[
        "run", "--dimension", "2", "--mode", "half", "--dist", "local", "--count", "5000",
        "--format", "csv", "--trace", trace.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let col = |name: &str| rows[0][headers.iter().position(|h| h == name).unwrap()].to_string();
    assert_eq!(col("nodes"), "72");
    assert_eq!(col("comm_steps"), col("comm_steps_model"));
    assert_eq!(col("status"), "ok");

    let text = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<_> = text.lines().collect();
    // one scatter and one gather message per forest edge
    assert_eq!(lines.len(), 2 * 71);
    for l in &lines {
        let f: Vec<_> = l.split(',').collect();
        assert_eq!(f.len(), 6, "{l}");
        assert!(f[3] == "electronic" || f[3] == "optical");
    }
    let gather_to_master: usize = lines
        .iter()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[2] == "0")
        .map(|f| f[4].parse::<usize>().unwrap())
        .sum();
    assert_eq!(gather_to_master, 71);
}

#[test]
fn generated_input_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.txt", "a.bin"] {
        let arr = dir.path().join(name);
        let o = ohhc(&["generate", "--dist", "reversed", "--count", "3000", "--out", arr.to_str().unwrap()]);
        assert!(o.status.success());
        let out = dir.path().join(format!("{name}.json"));
        let o = ohhc(&[
            "run", "--dimension", "1", "--input", arr.to_str().unwrap(), "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v = json(&out);
        assert_eq!(v["simulation"]["element_count"], 3000);
        assert_eq!(v["output_matches_baseline"], true);
    }
    let o = ohhc(&["run", "--dimension", "1", "--input", "/nonexistent/file.txt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn topology_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("edges.txt");
    let o = ohhc(&["topology", "--dimension", "1", "--mode", "full", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let electronic = text.lines().filter(|l| l.starts_with("E ")).count();
    let optical = text.lines().filter(|l| l.starts_with("O ")).count();
    assert_eq!(electronic, 9 * 6);
    assert_eq!(optical, (36 - 6) / 2);
}

#[test]
fn small_sweep_uses_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ohhc"))
        .args([
            "sweep", "--dims", "1,2", "--modes", "full,half", "--dists", "random,sorted",
            "--sizes", "4KB,2000", "--seed", "3",
        ])
        .env("OHHC_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut rdr = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 2 * 2 * 2);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0].parse::<usize>().unwrap(), i);
        assert_eq!(r.iter().last().unwrap(), "ok");
    }
    let mut rdr = csv::Reader::from_path(dir.path().join("baselines.csv")).unwrap();
    assert_eq!(rdr.records().count(), 2 * 2);
}

#[test]
fn sweep_with_failing_cell_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    // a 31-dimensional network is rejected per cell; the others still run
    let o = ohhc(&[
        "sweep", "--dims", "1,31", "--modes", "half", "--dists", "random", "--sizes", "1000",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with(",ok"));
    assert!(lines[2].contains("error"));
}
