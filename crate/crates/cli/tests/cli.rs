use std::path::PathBuf;
use std::process::{Command, Output};

fn symext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symext")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symext-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn records(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn rho_alpha_is_entangled_at_21() {
    let out = symext(&["test", "zoo:rho_alpha?alpha=3.5", "--level", "2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    assert_eq!(rec["outcome"], "entangled");
    assert_eq!(rec["level"], "2,1");
    assert_eq!(rec["mode"], "swap-symmetric");
    assert_eq!(rec["certificate"]["psd_ok"], true);
    assert!(rec["tolerances"]["t_tol"].as_f64().unwrap() > 0.0);
}

#[test]
fn maximally_mixed_isotropic_has_extension() {
    let out = symext(&["test", "zoo:isotropic?d=2&p=1", "--level", "2,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[0]["outcome"], "extension-found");
}

#[test]
fn npt_rho_alpha_at_first_level() {
    let out = symext(&["test", "zoo:rho_alpha?alpha=0.5", "--level", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    assert_eq!(rec["outcome"], "entangled");
    assert_eq!(rec["ppt"]["is_ppt"], false);
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(symext(&["test"]).status.code(), Some(1));
    assert_eq!(symext(&["test", "zoo:bell", "--level", "x"]).status.code(), Some(1));
    assert_eq!(symext(&["test", "/nonexistent/state.json"]).status.code(), Some(1));
    assert_eq!(symext(&["test", "zoo:unknown"]).status.code(), Some(1));
    assert_eq!(symext(&["sweep", "no-such-family"]).status.code(), Some(1));
    assert_eq!(symext(&["--help"]).status.code(), Some(0));
}

#[test]
fn state_file_round_trip_through_cli() {
    let path = scratch("rho.json");
    let out = symext(&["export-state", "zoo:rho_alpha?alpha=4.5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"dims\""));
    let out = symext(&["test", path.to_str().unwrap(), "--level", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[0]["outcome"], "entangled");
}

#[test]
fn malformed_state_file_is_rejected() {
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"dims":[2,2],"matrix":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}"#).unwrap();
    let out = symext(&["test", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}

#[test]
fn sweep_ppt_boundaries_and_csv() {
    let csv = scratch("sweep.csv");
    let out = symext(&["sweep", "rho_alpha", "--level", "1,1", "--step", "0.1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 51);
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    for (i, row) in rows.iter().enumerate() {
        let alpha: f64 = row[col("value")].parse().unwrap();
        assert_eq!(row[col("index")].parse::<usize>().unwrap(), i);
        let entangled = &row[col("outcome")] == "entangled";
        assert_eq!(entangled, alpha < 1.0 - 1e-9 || alpha > 4.0 + 1e-9, "alpha {alpha}");
    }
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("crossing").count(), 2);
}

#[test]
fn sweep_rows_are_ordered_with_workers() {
    let out = Command::new(env!("CARGO_BIN_EXE_symext"))
        .args(["sweep", "isotropic-2", "--level", "1,1", "--step", "0.125"])
        .env("SYMEXT_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let indices: Vec<usize> = text.lines().skip(1).filter(|l| !l.starts_with("crossing")).map(|l| l.split_whitespace().next().unwrap().parse().unwrap()).collect();
    assert_eq!(indices, (0..9).collect::<Vec<_>>());
}

#[test]
fn empty_sweep() {
    let out = symext(&["sweep", "rho_alpha", "--from", "2", "--to", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1);
}

#[test]
fn witness_for_rho_alpha() {
    let path = scratch("w.json");
    let out = symext(&["witness", "zoo:rho_alpha?alpha=3.5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = &records(&out)[0];
    let summary = &rec["witness"];
    assert!(summary["value_on_state"].as_f64().unwrap() < 0.0);
    assert!(summary["min_product_value"].as_f64().unwrap() >= -1e-7);
    assert_eq!(summary["verified"], true);
    assert!(summary["sos"]["min_term"].as_f64().unwrap() >= -1e-10);
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file["matrix"].as_array().unwrap().len(), 81);
    assert_eq!(file["summary"]["seesaw_seed"], 0x5DF5);
}

#[test]
fn witness_not_detected_exits_three() {
    let path = scratch("none.json");
    let out = symext(&["witness", "zoo:maximally_mixed?da=3&db=3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!path.exists());
}

#[test]
fn robustness_records() {
    let out = symext(&["robustness", "zoo:bell", "--level", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    assert!((rec["p_star"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-3);
    let out = symext(&["robustness", "zoo:maximally_mixed?da=2&db=2"]);
    assert_eq!(records(&out)[0]["p_star"].as_f64().unwrap(), 0.0);
}

#[test]
fn dump_round_trips() {
    let path = scratch("p.dump");
    let out = symext(&["dump", "zoo:bell", "--level", "2,1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("m 24\nblocks 8 8 8\n"));
    let p = symext::sdp::read_dump(text.as_bytes()).unwrap();
    assert_eq!(p.m(), 24);
}

#[test]
fn records_are_deterministic_apart_from_timing() {
    let strip = |out: Output| -> Vec<serde_json::Value> {
        records(&out)
            .into_iter()
            .map(|mut r| {
                r.as_object_mut().unwrap().remove("solve_seconds");
                r
            })
            .collect()
    };
    let a = strip(symext(&["test", "zoo:random_state?da=2&db=2&seed=3"]));
    let b = strip(symext(&["test", "zoo:random_state?da=2&db=2&seed=3"]));
    assert_eq!(a, b);
}
