//! End-to-end tests of the binary: golden values for every number the
//! rank tables, factor reports and walk listings are expected to
//! reproduce, plus exit-code behavior.

use serde_json::Value;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_arakdyn"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{args:?}: {stderr}");
    serde_json::from_str(&stdout).expect("valid JSON")
}

#[test]
fn ranks_genus_two_golden() {
    let v = run_json(&["ranks", "--genus", "2", "--max-n", "3"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["f_formula"], "4");
    assert_eq!(rows[0]["f_computed"], "4");
    assert_eq!(rows[1]["f_formula"], "9");
    assert_eq!(rows[2]["f_formula"], "25");
    assert_eq!(rows[3]["f_formula"], "73");
    // both homology readings, side by side
    assert_eq!(rows[2]["kn_formula"], "10");
    assert_eq!(rows[2]["kn_computed"], "28");
    assert_eq!(rows[1]["rn"], "4");
    assert_eq!(rows[2]["rn"], "3");
}

#[test]
fn ranks_single_row_at_level_zero() {
    let v = run_json(&["ranks", "--genus", "2", "--max-n", "0"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["f_formula"], "4");
}

#[test]
fn ranks_from_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.json");
    let theta = arakdyn::graph::DirectedGraph::preset_by_name("theta").unwrap();
    std::fs::write(&path, serde_json::to_string(&theta).unwrap()).unwrap();
    let v = run_json(&["ranks", "--graph", path.to_str().unwrap(), "--max-n", "2"]);
    let rows = v["rows"].as_array().unwrap();
    // θ_n = 6·2^n: ranks 6, 12-6+1, 24-12+1
    assert_eq!(rows[0]["f_computed"], "6");
    assert_eq!(rows[1]["f_computed"], "7");
    assert_eq!(rows[2]["f_computed"], "13");
}

#[test]
fn ranks_csv_view() {
    let (code, stdout, _) = run(&["ranks", "--genus", "2", "--max-n", "1", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,f_formula,f_computed,f_match,kn_formula,kn_computed,rn"
    );
    assert_eq!(lines.next().unwrap(), "0,4,4,true,,,");
    assert_eq!(lines.next().unwrap(), "1,9,9,true,6,12,4");
}

#[test]
fn walks_edge_matrices_golden() {
    let theta = run_json(&["walks", "--preset", "theta", "--level", "2"]);
    assert_eq!(theta["count"], 12);
    let a = &theta["edge_matrix"]["A"];
    assert_eq!(
        serde_json::to_string(a).unwrap(),
        "[[0,1,0,0,0,1],[1,0,1,0,0,0],[0,1,0,1,0,0],[0,0,1,0,1,0],[0,0,0,1,0,1],[1,0,0,0,1,0]]"
    );
    let dumbbell = run_json(&["walks", "--preset", "dumbbell", "--level", "1"]);
    assert_eq!(dumbbell["count"], 6);
    assert_eq!(
        serde_json::to_string(&dumbbell["edge_matrix"]["A"]).unwrap(),
        "[[0,0,1,0,0,1],[1,1,0,0,0,0],[0,0,1,1,0,0],[0,1,0,0,1,0],[1,0,0,0,1,0],[0,0,0,1,0,1]]"
    );
    let rose = run_json(&["walks", "--preset", "rose2", "--level", "2"]);
    assert_eq!(rose["count"], 12);
    assert_eq!(
        serde_json::to_string(&rose["edge_matrix"]["A"]).unwrap(),
        "[[1,1,0,1],[1,1,1,0],[0,1,1,1],[1,0,1,1]]"
    );
}

#[test]
fn walks_in_a_grown_neighborhood() {
    let v = run_json(&[
        "walks",
        "--preset",
        "theta",
        "--level",
        "2",
        "--ball-depth",
        "2",
        "--q",
        "3",
    ]);
    // base vertices carry measure q^(-1), depth-1 vertices q^(-2)
    let vertices = v["ball"]["vertices"].as_array().unwrap();
    let base = vertices.iter().find(|x| x["id"] == "u").unwrap();
    assert_eq!(base["d"], 0);
    assert_eq!(base["measure"], "1/3");
    let pendant = vertices.iter().find(|x| x["id"] == "u/0").unwrap();
    assert_eq!(pendant["d"], 1);
    assert_eq!(pendant["measure"], "1/9");
    // walks that never meet the finite graph exist at this depth
    let disjoint = v["walk_classes"]["disjoint"].as_u64().unwrap();
    assert!(disjoint > 0);
    assert!(v["walk_classes"]["confined"].as_u64().unwrap() > 0);
}

#[test]
fn ball_depth_zero_is_the_base_graph() {
    let v = run_json(&[
        "walks",
        "--preset",
        "theta",
        "--level",
        "1",
        "--ball-depth",
        "0",
        "--q",
        "3",
    ]);
    assert_eq!(v["ball"]["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(v["walk_classes"]["confined"], 6);
}

#[test]
fn lfactor_arch_identity() {
    for kappa in ["c", "r"] {
        let v = run_json(&[
            "lfactor", "--arch", "--genus", "2", "--s", "1.5", "--kappa", kappa,
        ]);
        let err = v["identity_error"].as_f64().unwrap();
        assert!(err < 1e-8, "kappa {kappa}: {err}");
    }
}

#[test]
fn lfactor_arch_complex_point() {
    let v = run_json(&["lfactor", "--arch", "--genus", "3", "--s", "2+1i"]);
    assert!(v["identity_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["s"][1], 1.0);
}

#[test]
fn lfactor_nonarch_golden() {
    let v = run_json(&[
        "lfactor",
        "--nonarch",
        "--genus",
        "1",
        "--q",
        "2",
        "--s",
        "1",
    ]);
    assert!((v["L"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(v["L"][1].as_f64().unwrap().abs() < 1e-12);
    assert!(v["fit"]["residual"].as_f64().unwrap() < 1e-8);
    let v2 = run_json(&[
        "lfactor",
        "--nonarch",
        "--genus",
        "2",
        "--q",
        "3",
        "--s",
        "2",
    ]);
    assert!((v2["L"][0].as_f64().unwrap() - 81.0 / 64.0).abs() < 1e-12);
}

#[test]
fn lfactor_nonarch_explicit_grid() {
    let v = run_json(&[
        "lfactor",
        "--nonarch",
        "--genus",
        "2",
        "--q",
        "5",
        "--s",
        "0.7",
        "--s-grid",
        "0.5:2.5:0.1",
    ]);
    assert!(v["fit"]["residual"].as_f64().unwrap() < 1e-8);
    assert!(v["fit"]["a"].as_f64().unwrap().abs() < 1e-8);
    assert!(v["fit"]["b"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn spectrum_multiplicity_models() {
    let v = run_json(&[
        "spectrum", "--genus", "2", "--kind", "arch-v", "--level", "5",
    ]);
    for line in v["lines"].as_array().unwrap() {
        assert_eq!(line["mult"], 4);
        assert!(line["lambda_int"].as_i64().unwrap() <= 0);
    }
    let vf = run_json(&[
        "spectrum",
        "--genus",
        "2",
        "--kind",
        "arch-v-finf",
        "--level",
        "2",
    ]);
    for line in vf["lines"].as_array().unwrap() {
        assert_eq!(line["mult"], 2);
    }
    // the dual-graph multiplicity is the first Betti number
    let nv = run_json(&[
        "spectrum",
        "--preset",
        "theta",
        "--kind",
        "nonarch-v",
        "--q",
        "3",
    ]);
    for line in nv["lines"].as_array().unwrap() {
        assert_eq!(line["mult"], 2);
    }
    assert_eq!(nv["scale"]["transcendental"], "2pi_over_log_q");
    assert_eq!(nv["scale"]["q"], 3);
}

#[test]
fn spectrum_grading_multiplicities() {
    let v = run_json(&[
        "spectrum", "--genus", "2", "--kind", "arch-l", "--level", "1",
    ]);
    let lines = v["lines"].as_array().unwrap();
    assert_eq!(lines[0]["mult"], 4);
    assert_eq!(lines[1]["mult"], 8);
    assert_eq!(v["scale"]["transcendental"], "1");
}

#[test]
fn spectrum_probe_is_bounded() {
    let v = run_json(&[
        "spectrum", "--preset", "theta", "--kind", "arch-l", "--level", "3", "--probe", "3",
    ]);
    for row in v["probe"].as_array().unwrap() {
        let norm = row["norm"].as_f64().unwrap();
        assert!(norm <= 1.0 + 1e-9, "{row}");
    }
}

#[test]
fn ck_relations_exact_via_cli() {
    let (code, stdout, _) = run(&[
        "ck", "--preset", "dumbbell", "--level", "3", "--format", "text",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("relations: exact"));
    let v = run_json(&["ck", "--genus", "2", "--level", "2"]);
    assert_eq!(v["relations"], "exact");
    assert_eq!(v["ck1_exact"], true);
    assert_eq!(v["ck2_exact"], true);
}

#[test]
fn fiber_descriptor_golden() {
    let v = run_json(&["fiber", "--preset", "theta", "--edge", "a", "--t", "0.3"]);
    assert_eq!(v["edge"], "a");
    assert_eq!(v["cylinders"][0]["edge"], "a");
    assert_eq!(v["cylinders"][0]["t"], 0.3);
    assert_eq!(v["cylinders"][1]["edge"], "A");
    assert_eq!(v["cylinders"][1]["t"], 0.7);
}

#[test]
fn budget_env_var_trips_with_distinct_exit_code() {
    let (code, _, stderr) = run_env(
        &["ranks", "--genus", "3", "--max-n", "5"],
        &[("ARAKDYN_BUDGET", "100")],
    );
    assert_eq!(code, 3, "{stderr}");
    assert!(stderr.contains("budget"));
}

#[test]
fn io_failure_has_distinct_exit_code() {
    let (code, _, _) = run(&["ranks", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(code, 4);
}

#[test]
fn usage_error_requires_one_source() {
    let (code, _, _) = run(&["ranks"]);
    assert_eq!(code, 2);
    let (code2, _, _) = run(&["ranks", "--genus", "2", "--preset", "theta"]);
    assert_eq!(code2, 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, stdout, _) = run(&[
        "ranks",
        "--genus",
        "2",
        "--max-n",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let data = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&data).unwrap();
    assert_eq!(v["rows"][1]["f_formula"], "9");
}

#[test]
fn unsupported_csv_view_is_a_usage_error() {
    let (code, _, stderr) = run(&[
        "fiber", "--preset", "theta", "--edge", "a", "--t", "0.1", "--format", "csv",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("no CSV view"));
}
