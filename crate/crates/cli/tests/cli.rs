use std::path::Path;
use std::process::{Command, Output};

use blockrec::bounds::epsilon_bound;
use blockrec::chain::{generate_decoupled, generate_perturbation};
use blockrec::io::{read_matrix, read_partition};
use blockrec::matrix::ClusterPartition;
use serde_json::Value;

fn blockrec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockrec")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn generate(dir: &Path, sizes: &str, seed: &str, x: Option<&str>) -> Output {
    let mut args = vec!["generate", "--sizes", sizes, "--seed", seed, "--out", "."];
    if let Some(x) = x {
        args.extend(["--x", x]);
    }
    let o = blockrec(&args, dir);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    o
}

fn planted_blocks(json: &Value) -> Vec<Vec<u64>> {
    serde_json::from_value(json["partition"]["blocks"].clone()).unwrap()
}

#[test]
fn generate_writes_reloadable_files() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3,2", "7", None);
    let chain = generate_decoupled(&[3, 2], 7, 0.0).unwrap();
    let inst = generate_perturbation(&chain, 7).unwrap();
    assert_eq!(&read_matrix(&dir.path().join("t0.mtx")).unwrap(), chain.matrix());
    assert_eq!(&read_matrix(&dir.path().join("e.mtx")).unwrap(), inst.e());
    assert_eq!(read_partition(&dir.path().join("partition.json")).unwrap(), ClusterPartition::from_sizes(&[3, 2]).unwrap());

    let text = std::fs::read_to_string(dir.path().join("partition.json")).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["n"], 5);
    assert_eq!(json["blocks"], serde_json::json!([[1, 2, 3], [4, 5]]));
}

#[test]
fn generate_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = blockrec(&["generate", "--sizes", "2,2", "--matrix-format", "csv", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("out/t0.csv").exists());
    assert!(dir.path().join("out/e.csv").exists());
}

#[test]
fn generate_single_block_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = generate(dir.path(), "1", "0", None);
    assert!(stderr(&o).contains("warning"));
    assert!(!stdout(&o).contains("x_star"));
}

#[test]
fn generate_prints_positive_xstar() {
    let dir = tempfile::tempdir().unwrap();
    let o = generate(dir.path(), "10,10,10", "1", None);
    let line = stdout(&o).lines().find(|l| l.starts_with("x_star")).unwrap().to_string();
    let value: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!(value > 0.0);
}

#[test]
fn recover_decoupled_empirical() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3,4,2", "3", None);
    let o = blockrec(&["recover", "t0.mtx", "--k", "3", "--mode", "empirical"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(planted_blocks(&json), vec![vec![1, 2, 3], vec![4, 5, 6, 7], vec![8, 9]]);
    assert!(json["diagnostics"]["residual"].as_f64().unwrap().abs() < 1e-12);
    assert!(!stderr(&o).contains("warning"));
}

#[test]
fn recover_oracle_in_regime() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "5,5", "4", Some("0.02"));
    let inst = generate_perturbation(&generate_decoupled(&[5, 5], 4, 0.0).unwrap(), 4).unwrap();
    let eps = epsilon_bound(0.02, inst.norm_e(), inst.sigma_gap()).unwrap().epsilon;
    let eps = format!("{eps:e}");
    let o = blockrec(&["recover", "tx.mtx", "--k", "2", "--mode", "oracle_epsilon", "--epsilon", &eps, "--out", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(planted_blocks(&json), vec![vec![1, 2, 3, 4, 5], vec![6, 7, 8, 9, 10]]);
    assert_eq!(json["mode"], "oracle_epsilon");
}

#[test]
fn recover_known_sizes_needs_sizes() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3,3", "1", None);
    let o = blockrec(&["recover", "t0.mtx", "--k", "2", "--mode", "known_sizes"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = blockrec(&["recover", "t0.mtx", "--k", "2", "--mode", "known_sizes", "--n1", "3", "--n2", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn recover_far_out_of_regime_warns() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3,3", "4", Some("1"));
    let o = blockrec(&["recover", "tx.mtx", "--k", "2", "--mode", "known_sizes", "--n1", "3", "--n2", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(serde_json::from_str::<Value>(&stdout(&o)).unwrap()["partition"]["n"] == 6);
    assert!(stderr(&o).contains("no bound certifies"));
}

#[test]
fn exit_code_degenerate_gap() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("id.csv"), "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n").unwrap();
    let o = blockrec(&["recover", "id.csv", "--k", "2"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn exit_code_no_gap() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "2,2,2", "0", Some("1"));
    let o = blockrec(&["recover", "tx.mtx", "--k", "3", "--mode", "empirical"], dir.path());
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn exit_code_no_candidate() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "2,2,2", "45", Some("1"));
    let o = blockrec(&["approx", "tx.mtx", "--k", "3", "--epsilon", "0"], dir.path());
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
}

#[test]
fn approx_decoupled_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "4,4,4", "2", None);
    let o = blockrec(&["approx", "t0.mtx", "--k", "3", "--epsilon", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s_hat: Vec<u64> = serde_json::from_value(json["s_hat"].clone()).unwrap();
    let j = json["selected_j"].as_u64().unwrap();
    assert!(s_hat.contains(&j));
    assert!([[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12]].iter().any(|b| b.as_slice() == s_hat.as_slice()));
}

#[test]
fn estimate_k_on_decoupled_chain() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "4,4,3", "6", None);
    let o = blockrec(&["estimate-k", "t0.mtx", "--k", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["k"], 3);
}

#[test]
fn malformed_inputs_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.mtx"), "not a matrix\n").unwrap();
    std::fs::write(dir.path().join("ragged.csv"), "1,0\n0.5\n").unwrap();
    std::fs::write(dir.path().join("m.txt"), "1\n").unwrap();
    for file in ["bad.mtx", "ragged.csv", "m.txt", "missing.csv"] {
        let o = blockrec(&["recover", file, "--k", "2"], dir.path());
        assert_eq!(o.status.code(), Some(2), "{file}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"), "{file}");
    }
    let o = blockrec(&["recover", "bad.mtx", "--k", "2", "--norm", "l1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--sizes", "4,4", "--seed", "3", "--x-grid", "0:0.1:6", "--no-timestamp", "--out"];
    let a = blockrec(&[&args[..], &["a.csv"]].concat(), dir.path());
    let b = blockrec(&[&args[..], &["b.csv"], &["--sequential"]].concat(), dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(b.status.code(), Some(0));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=blockrec-sweep version=1"));
    assert_eq!(lines.next(), Some("x,epsilon,mode,exact_success,symdiff,tried_gaps,runtime_ms,error"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6 * 4);
    for row in rows.iter().filter(|r| r[0].parse::<f64>().unwrap() == 0.0) {
        match row[2] {
            "approx_one" => assert_eq!(row[4], "0"),
            _ => assert_eq!(row[3], "true", "{row:?}"),
        }
    }
}

#[test]
fn sweep_config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.cfg"), "sizes = 3,3\nseed = 2\nx_list = 0,0.01\nmodes = empirical\nformat = jsonl\ntimestamp = false\n").unwrap();
    let o = blockrec(&["sweep", "--config", "exp.cfg", "--mode", "oracle_epsilon,empirical"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["schema"], "blockrec-sweep");
    assert!(lines[0].get("generated_unix").is_none());
    assert_eq!(lines.len(), 1 + 2 * 2);
}

#[test]
fn sweep_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["sweep", "--sizes", "3,3", "--x", "0", "--mode", ""],
        &["sweep", "--sizes", "3,3", "--x", "2"],
        &["sweep", "--x", "0"],
        &["sweep", "--config", "missing.cfg"],
    ];
    for args in cases {
        let o = blockrec(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn verify_bounds_campaign_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = blockrec(&["verify-bounds", "--instances", "100", "--max-n", "40", "--seed", "9", "--no-timestamp", "--out", "c.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = stderr(&o);
    assert!(summary.contains("instances=100") && summary.contains("violations=0"), "{summary}");
    let text = std::fs::read_to_string(dir.path().join("c.jsonl")).unwrap();
    let records: Vec<Value> = text.lines().skip(1).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(records.iter().all(|r| r["satisfied"] != false));
}

#[test]
fn verify_bounds_out_of_regime_rows_are_not_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = blockrec(&["verify-bounds", "--instances", "3", "--sizes", "3,3", "--x", "0.9,1", "--no-timestamp"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let records: Vec<Value> = stdout(&o).lines().skip(1).map(|l| serde_json::from_str(l).unwrap()).collect();
    let out = records.iter().filter(|r| r["in_regime"] == false).count();
    assert!(out > 0);
}

#[test]
fn verify_bounds_at_zero_has_zero_lhs() {
    let dir = tempfile::tempdir().unwrap();
    let o = blockrec(&["verify-bounds", "--instances", "1", "--sizes", "3,4", "--x", "0", "--no-timestamp"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for line in stdout(&o).lines().skip(1) {
        let r: Value = serde_json::from_str(line).unwrap();
        if r["name"] == "weyl_small" || r["name"] == "theorem3" {
            assert!(r["lhs"].as_f64().unwrap() < 1e-12, "{r}");
        }
    }
}
