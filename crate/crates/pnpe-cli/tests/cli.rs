//! End-to-end tests of the binary: exit codes, determinism, config
//! handling and output shape.

use std::io::Write;
use std::process::{Command, Output};

fn pnpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnpe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

#[test]
fn table_s1_regression_passes() {
    let out = pnpe(&["table-s1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 10);
    // Metadata headers present.
    assert!(text.starts_with("# pnpe "));
    assert!(text.contains("# config-hash sha256:"));
    assert!(text.contains("# units:"));
    assert!(text.contains("# config:"));
    // Every delta is within the regression gate.
    for row in rows {
        let delta: f64 = row.split(',').nth(10).unwrap().parse().unwrap();
        assert!(delta <= 1e-3, "row {row}");
    }
}

#[test]
fn table_s1_eta_filter() {
    let out = pnpe(&["table-s1", "--eta", "0.65"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    let s_sim: f64 = rows[0].split(',').nth(8).unwrap().parse().unwrap();
    assert!((s_sim - 2.0).abs() < 1e-3);

    // A filter matching no row is a config error.
    let out = pnpe(&["table-s1", "--eta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncated_cutoff_trips_regression_gate() {
    // At cutoff 2 the simulated values drift past the 1e-3 gate; exit
    // code 3 lets CI distinguish this from usage errors.
    let out = pnpe(&["table-s1", "--cutoff", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["optimize", "--eta", "0.85", "--seed", "42"],
        vec!["sweep-eta"],
        vec!["success-prob", "--format", "json"],
    ] {
        let a = pnpe(&args);
        let b = pnpe(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "args {args:?}");
    }
}

#[test]
fn json_output_parses_and_mirrors_rows() {
    let out = pnpe(&["table-s1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 10);
    assert_eq!(doc["meta"]["command"], "table-s1");
    assert!(doc["meta"]["config_hash"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
    let row0 = &doc["rows"][0];
    assert_eq!(row0["eta_D"].as_f64().unwrap(), 0.65);
}

#[test]
fn unknown_config_key_rejected() {
    let mut f = tempfile_path("bad.cfg");
    writeln!(f.1, "source.gg = 0.3").unwrap();
    let out = pnpe(&["table-s1", "--config", f.0.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown key"));
}

#[test]
fn malformed_grid_rejected() {
    let mut f = tempfile_path("grid.cfg");
    writeln!(f.1, "sweep.eta_step = -0.1").unwrap();
    let out = pnpe(&["sweep-eta", "--config", f.0.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_overrides_apply() {
    let mut f = tempfile_path("seed.cfg");
    writeln!(f.1, "optimizer.seed = 7\noptimizer.restarts = 5").unwrap();
    let out = pnpe(&["optimize", "--eta", "1.0", "--config", f.0.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = data_rows(&text)[0];
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[10], "7");
    // The --seed flag takes precedence over the config file.
    let out = pnpe(&[
        "optimize",
        "--eta",
        "1.0",
        "--config",
        f.0.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    let text = stdout(&out);
    assert_eq!(data_rows(&text)[0].split(',').last().unwrap(), "9");
}

#[test]
fn sweep_endpoints_match_reference() {
    let out = pnpe(&["sweep-eta"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = data_rows(&text);
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    let last: Vec<f64> = rows[rows.len() - 1]
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.65);
    assert!((first[1] - 2.0).abs() < 1e-6);
    assert_eq!(last[0], 1.0);
    assert!(last[1] >= 2.6850);
}

#[test]
fn success_prob_ordering_and_slope() {
    let out = pnpe(&["success-prob"]);
    assert!(out.status.success());
    for row in data_rows(&stdout(&out)) {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        let (p_tmsv, p_hyb, p_sppe, slope) = (v[1], v[2], v[3], v[4]);
        assert!(p_tmsv >= p_hyb && p_hyb >= p_sppe, "row {row}");
        if v[0] <= 1e-2 {
            assert!((slope - 0.5).abs() <= 0.01, "row {row}");
        }
    }
}

#[test]
fn di_metrics_family_contrast() {
    let out = pnpe(&["di-metrics"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut hybrid_070 = None;
    let mut psi_080 = None;
    for row in data_rows(&text) {
        let cells: Vec<&str> = row.split(',').collect();
        let eta: f64 = cells[1].parse().unwrap();
        let h_min: f64 = cells[3].parse().unwrap();
        if cells[0] == "hybrid" && (eta - 0.70).abs() < 1e-9 {
            hybrid_070 = Some(h_min);
        }
        if cells[0] == "psi-sppe" && (eta - 0.80).abs() < 1e-9 {
            psi_080 = Some(h_min);
        }
    }
    // Below the anticorrelated-family threshold only the full protocol
    // certifies randomness.
    assert!(hybrid_070.unwrap() > 0.0);
    assert_eq!(psi_080.unwrap(), 0.0);
}

#[test]
fn compare_states_reports_both_thresholds() {
    let out = pnpe(&["compare-states"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut phi_thr = None;
    let mut psi_thr = None;
    let mut phi_opt = None;
    let mut psi_opt = None;
    for row in data_rows(&text) {
        let cells: Vec<&str> = row.split(',').collect();
        let eta: f64 = cells[1].parse().unwrap();
        let s: f64 = cells[2].parse().unwrap();
        match cells[0] {
            "phi-threshold" => phi_thr = Some(eta),
            "psi-threshold" => psi_thr = Some(eta),
            "phi-optimum" => phi_opt = Some(s),
            "psi-optimum" => psi_opt = Some(s),
            _ => {}
        }
    }
    assert!((0.66..=0.68).contains(&phi_thr.unwrap()));
    assert!((0.82..=0.83).contains(&psi_thr.unwrap()));
    // The two families reach measurably different lossless optima.
    assert!(psi_opt.unwrap() > phi_opt.unwrap());
}

#[test]
fn eta_h_grid_stays_violating() {
    let out = pnpe(&["compare-states", "--eta-h-grid"]);
    assert!(out.status.success());
    let mut scanned = 0;
    for row in data_rows(&stdout(&out)) {
        let cells: Vec<&str> = row.split(',').collect();
        if cells[0] == "eta-h-scan" {
            scanned += 1;
            let s: f64 = cells[2].parse().unwrap();
            assert!(s > 2.0, "row {row}");
        }
    }
    assert_eq!(scanned, 10);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join("pnpe-cli-test-out");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let out = pnpe(&["table-s1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(data_rows(&text).len(), 10);
    std::fs::remove_file(&path).ok();
}

fn tempfile_path(name: &str) -> (std::path::PathBuf, std::fs::File) {
    let dir = std::env::temp_dir().join(format!("pnpe-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let file = std::fs::File::create(&path).unwrap();
    (path, file)
}
