use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jsrkit"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("JSRKIT_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn golden_bounds() {
    let g = data("golden.json");
    let v = json_of(&run(&["bounds", "--input", &g, "--max-len", "8"], None));
    let lo = v["best_lower"].as_f64().unwrap();
    let hi = v["best_upper"].as_f64().unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(lo >= 1.61 && lo <= phi + 1e-12 && hi >= phi);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["flags"]["max_len"], 8);
    assert_eq!(v["input"]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["curves"].as_array().unwrap().len(), 8);
}

#[test]
fn csv_and_json_inputs_agree() {
    let a = json_of(&run(&["bounds", "--input", &data("golden.json"), "--max-len", "6"], None));
    let b = json_of(&run(&["bounds", "--input", &data("golden.csv"), "--max-len", "6"], None));
    assert_eq!(a["curves"], b["curves"]);
    assert_eq!(a["best_upper"], b["best_upper"]);
}

#[test]
fn cycle_graph_periods() {
    let v = json_of(&run(&["graph", "--input", &data("cycle3.json")], None));
    assert_eq!(v["vertex_periods"], serde_json::json!([3, 3, 3]));
    assert_eq!(v["global_period"], 3);
    assert_eq!(v["trivial_zero"], false);
    assert_eq!(v["components"].as_array().unwrap().len(), 1);
}

#[test]
fn unreachable_distances_are_labelled() {
    let dir = std::env::temp_dir().join(format!("jsrkit-tri-{}.json", std::process::id()));
    std::fs::write(&dir, r#"{"dim": 2, "matrices": [[[0, 1], [0, 0]]]}"#).unwrap();
    let v = json_of(&run(&["graph", "--input", dir.to_str().unwrap()], None));
    std::fs::remove_file(&dir).ok();
    assert_eq!(v["trivial_zero"], true);
    let flat: Vec<&Value> = v["component_distances"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).collect();
    assert!(flat.iter().any(|d| d.as_str() == Some("unreachable")));
}

#[test]
fn trace_on_cycle() {
    let v = json_of(&run(&["trace", "--input", &data("cycle3.json"), "--max-len", "12"], None));
    let logs = v["log_max_trace"].as_array().unwrap();
    for (idx, t) in logs.iter().enumerate() {
        let k = idx + 1;
        if k % 3 == 0 {
            assert!(t.is_number());
        } else {
            assert!(t.is_null(), "trace at k={k} should be zero");
        }
    }
    assert!(v["sandwich_holds"].as_array().unwrap().iter().all(|b| b == true));
}

#[test]
fn trace_rejects_horizon_below_period() {
    let out = run(&["trace", "--input", &data("cycle3.json"), "--max-len", "2"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_exits_2() {
    let out = run(&["bounds", "--input", "/nonexistent/set.json"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_input_exits_2() {
    let out = run(&["bounds", "--input", &data("negative.json")], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flag_exits_2() {
    let out = run(&["bounds", "--input", &data("golden.json"), "--max-len", "0"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_guard_exits_3() {
    let out = run(&["oracle", "--input", &data("golden.json"), "--max-len", "30"], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn oracle_reports_golden_pair() {
    let v = json_of(&run(&["oracle", "--input", &data("golden.json"), "--max-len", "4"], None));
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((v["generalized_lower"]["value"].as_f64().unwrap() - phi).abs() < 1e-9);
    assert_eq!(v["generalized_lower"]["achieving_word"], serde_json::json!([0, 1]));
    assert_eq!(v["brute"]["log_norm"].as_array().unwrap().len(), 4);
}

#[test]
fn check_reports_diagnostics() {
    let v = json_of(&run(&["check", "--input", &data("golden.json"), "--max-len", "12"], None));
    assert_eq!(v["fekete"][0]["supermultiplicative"], true);
    assert_eq!(v["fekete"][0]["horizon_limited"], true);
    assert!(v["ratio_checks"][0]["max_ratio"].is_number());
    assert!(v["growth_fit"]["exponent"].is_number());
    assert!(v["table_invariants"].is_null());
}

#[test]
fn dump_frontier_lists_words() {
    let v = json_of(&run(&["bounds", "--input", &data("golden.json"), "--max-len", "3", "--dump-frontier", "3"], None));
    let items = v["frontier"]["items"].as_array().unwrap();
    assert!(!items.is_empty());
    assert!(items.iter().all(|it| it["word"].as_array().unwrap().len() == 3));
}

#[test]
fn random_output_loads_back() {
    let out = run(&["random", "--dim", "3", "--count", "2", "--seed", "7", "--name", "r7"], None);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 3);
    assert_eq!(v["name"], "r7");
    assert_eq!(v["matrices"].as_array().unwrap().len(), 2);
}

#[test]
fn table_format_is_aligned() {
    let out = run(&["bounds", "--input", &data("golden.json"), "--max-len", "4", "--format", "table"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().take(5).collect();
    assert!(lines.iter().all(|l| l.len() == lines[0].len()));
}

#[test]
fn output_is_deterministic_across_runs_and_threads() {
    let g = data("golden.json");
    let args = ["bounds", "--input", g.as_str(), "--max-len", "12", "--witness", "--dump-frontier", "12"];
    let a = run(&args, Some("1"));
    let b = run(&args, Some("4"));
    let c = run(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}
