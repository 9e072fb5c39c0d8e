use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sqoa::io::{read_json, TransferFile};
use sqoa::sweep::{read_csv, RowKind};

fn sqoa(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqoa"))
        .current_dir(dir)
        .args(args)
        .env_clear()
        .envs(env.iter().copied())
        .output()
        .expect("binary runs")
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn gen_writes_parseable_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let listed = ok(sqoa(dir.path(), &["gen", "--n", "8,10", "--count", "2", "--out-dir", "g"], &[]));
    let files: Vec<&str> = listed.lines().collect();
    assert_eq!(files.len(), 4);
    for f in files {
        let g = sqoa::io::load_graph(&dir.path().join(f)).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3));
    }
}

#[test]
fn tune_solve_baseline_and_exact_work_together() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(sqoa(d, &["gen", "--n", "12", "--out-dir", "."], &[]));
    let graph = "rr3_n12_s0_0.txt";
    ok(sqoa(
        d,
        &["tune", "--instance", graph, "--p", "1..2", "--budget", "40", "--transfer", "t.json", "--report", "rep.json"],
        &[],
    ));
    let t: TransferFile = read_json(&d.join("t.json")).unwrap();
    assert_eq!(t.entries.len(), 2);
    let reports: Value = read_json(&d.join("rep.json")).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 2);
    assert_eq!(reports[0]["evaluations"], 40);

    let exact: Value = serde_json::from_str(&ok(sqoa(
        d,
        &["exact", "--instance", graph, "--hamiltonian", "h.json"],
        &[],
    )))
    .unwrap();
    assert_eq!(exact["certified"], true);
    assert!(exact["e_min"].as_f64().unwrap() <= -exact["c_opt"].as_f64().unwrap());
    let h: Value = read_json(&d.join("h.json")).unwrap();
    assert_eq!(h["n_qubits"], exact["n_qubits"]);
    assert_eq!(h["offset"], -9.0);

    let rec: Value = serde_json::from_str(&ok(sqoa(
        d,
        &["solve", "--instance", graph, "--transfer", "t.json", "--p", "2", "--r", "8", "--shots", "4000"],
        &[],
    )))
    .unwrap();
    assert_eq!(rec["e_min"], exact["e_min"]);
    assert_eq!(rec["c_opt"], exact["c_opt"]);
    let alpha_c = rec["cut"].as_f64().unwrap() / rec["c_opt"].as_f64().unwrap();
    assert_eq!(rec["alpha_c"].as_f64().unwrap(), alpha_c);
    assert!(rec.get("timings_ms").is_none());

    let timed: Value = serde_json::from_str(&ok(sqoa(
        d,
        &["solve", "--instance", graph, "--params", "0.2,0,0.6,-0.7", "--p", "2", "--r", "8", "--shots", "4000", "--timings"],
        &[],
    )))
    .unwrap();
    assert!(timed["timings_ms"]["eigensolve"].as_f64().is_some());

    let base: Value = serde_json::from_str(&ok(sqoa(
        d,
        &["baseline", "--instance", graph, "--method", "fine-tune", "--transfer", "t.json", "--p", "2", "--budget", "20"],
        &[],
    )))
    .unwrap();
    assert_eq!(base["method"], "fine-tune");
    assert_eq!(base["schedule"]["gammas"].as_array().unwrap().len(), 2);
}

#[test]
fn every_flag_reads_its_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let env = [
        ("SQOA_N", "10"),
        ("SQOA_PARAMS", "0.2,0,0.6,-0.7"),
        ("SQOA_P", "2"),
        ("SQOA_R", "4"),
        ("SQOA_SHOTS", "3000"),
        ("SQOA_SEED", "9"),
        ("SQOA_MIXER", "Y"),
    ];
    let rec: Value = serde_json::from_str(&ok(sqoa(dir.path(), &["solve"], &env))).unwrap();
    assert_eq!(rec["config"]["mixer"], "Y");
    assert_eq!(rec["config"]["seed"], 9);
    assert_eq!(rec["subspace"]["requested"], 4);
    // flags take precedence over the environment
    let rec: Value = serde_json::from_str(&ok(sqoa(dir.path(), &["solve", "--r", "2"], &env))).unwrap();
    assert_eq!(rec["subspace"]["requested"], 2);
}

#[test]
fn sweep_writes_data_and_aggregate_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(sqoa(d, &["tune", "--n", "10", "--p", "1", "--budget", "30", "--transfer", "t.json"], &[]));
    ok(sqoa(
        d,
        &[
            "sweep", "--n", "10", "--p", "1", "--r", "2^0..2^2", "--instances", "3", "--transfer", "t.json",
            "--shots", "2000", "--out", "s.csv", "--quiet",
        ],
        &[],
    ));
    let rows = read_csv(std::fs::File::open(d.join("s.csv")).unwrap()).unwrap();
    assert_eq!(rows.iter().filter(|r| r.kind == RowKind::Data).count(), 9);
    assert_eq!(rows.iter().filter(|r| r.kind == RowKind::Aggregate).count(), 3);
    assert!(rows.iter().all(|r| r.error.is_none() && r.time_ms.is_none()));

    let rnd = ok(sqoa(
        d,
        &["sweep", "--n", "10", "--p", "1", "--method", "random-init", "--budget", "10", "--quiet"],
        &[],
    ));
    assert_eq!(rnd.lines().count(), 3);
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = sqoa(d, &["solve", "--n", "10", "--p", "1", "--r", "4"], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--transfer or --params"));

    let out = sqoa(d, &["solve", "--n", "10", "--params", "0,0,0,0", "--p", "1", "--r", "100000"], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));

    std::fs::write(d.join("bad.txt"), "3 2\n0 1\n").unwrap();
    let out = sqoa(d, &["exact", "--instance", "bad.txt"], &[]);
    assert!(!out.status.success());

    let out = sqoa(d, &["sweep", "--n", "10", "--p", "1", "--quiet"], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("transfer"));
}
