use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatgraph")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json", "--no-timestamp"];
    all.extend_from_slice(args);
    let o = run(&all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (o.status.code().unwrap(), v)
}

#[test]
fn class_number_of_13_is_one() {
    let o = run(&["class-number", "--disc", "13"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
    let (code, v) = json(&["class-number", "--disc", "11"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["class_number"], 2);
}

#[test]
fn unit_groups() {
    for (p, order) in [(2, 12), (3, 6), (5, 3), (7, 2), (13, 1)] {
        let (code, v) = json(&["units", "--P", &p.to_string()]);
        assert_eq!(code, 0);
        assert_eq!(v["report"]["order"], order, "P={p}");
    }
}

#[test]
fn negative_congruence_case_is_reported_not_failed() {
    let (code, v) = json(&["congruence-pairs", "--P", "3", "--m", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["negative"], true);
    assert_eq!(v["report"]["pairs"].as_array().unwrap().len(), 0);
}

#[test]
fn positive_congruence_pair_carries_certificate() {
    let (code, v) = json(&["congruence-pairs", "--P", "2", "--reference", "--m", "3"]);
    assert_eq!(code, 0);
    let pair = &v["report"]["pairs"][0];
    assert_eq!(pair["certificate"]["verified"], true);
    assert_eq!(pair["certificate"]["intersection_size"], 1);
}

#[test]
fn pipeline_small_case() {
    let (code, v) = json(&["pipeline", "--P", "2", "--p", "5", "--auto-q"]);
    assert_eq!(code, 0);
    let g = &v["report"]["graph"];
    assert_eq!(g["n_vertices"], 660);
    assert_eq!(g["degree"], 6);
    assert_eq!(g["ramanujan"], true);
    for key in ["P", "Q", "T", "p", "q", "m", "H_label", "second_eigenvalue", "bound", "tolerance"] {
        assert!(g.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn pipeline_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["pipeline", "--P", "7", "--p", "3", "--auto-q", "--output-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let edges = std::fs::read_to_string(dir.path().join("graph.edgelist")).unwrap();
    assert!(edges.starts_with("# vertices="));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["ramanujan"], true);
}

#[test]
fn spectrum_check_passes() {
    let o = run(&["spectrum", "--P", "13", "--p", "3", "--auto-q", "--check-ramanujan"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("Ramanujan"));
}

#[test]
fn failed_verdict_exits_two() {
    // a negative tolerance moves the threshold below the true bound
    let o = run(&["spectrum", "--P", "2", "--p", "5", "--auto-q", "--tolerance=-1", "--check-ramanujan"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["units"]).status.code(), Some(1));
    // q and --auto-q are exclusive
    assert_eq!(run(&["graph", "--P", "2", "--p", "5", "--q", "11", "--auto-q"]).status.code(), Some(1));
    assert_eq!(run(&["order", "--P", "4"]).status.code(), Some(1));
    let o = run(&["--json", "units"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "usage");
}

#[test]
fn json_without_timestamp_is_reproducible() {
    let args = ["--json", "--no-timestamp", "pipeline", "--P", "5", "--p", "3", "--auto-q"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.get("generated_at").is_none());
    let with = run(&["--json", "units", "--P", "2"]);
    let v: Value = serde_json::from_slice(&with.stdout).unwrap();
    assert!(v["generated_at"].is_string());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nP=2\np=5\nauto-q=true\njson=true\nno-timestamp=true\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = run(&["--config", cfg, "pipeline"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["graph"]["P"], 2);
    let o = run(&["--config", cfg, "pipeline", "--P", "7", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["graph"]["P"], 7);
    assert_eq!(v["report"]["graph"]["p"], 3);
}

#[test]
fn verify_tables_reports_known_issues() {
    let (code, v) = json(&["verify-tables"]);
    assert_eq!(code, 0);
    let summary = &v["report"]["summary"];
    assert_eq!(summary["mismatches"], 0);
    assert!(summary["known_issues"].as_u64().unwrap() > 0);
    let rows = v["report"]["rows"].as_array().unwrap();
    let status = |item: &str| rows.iter().find(|r| r["item"] == item).unwrap()["status"].clone();
    assert_eq!(status("P=2 unit table row 1"), "known-issue");
    assert_eq!(status("P=3 unit table row 2"), "ok");
    assert_eq!(status("congruence pair P=3 m=4"), "known-issue");
}

#[test]
fn edgelist_export_has_header() {
    let o = run(&["graph", "--P", "2", "--p", "5", "--q", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# vertices=660 degree=6 p=5 q=11"));
    let mut degree = vec![0u32; 660];
    for line in lines {
        let f: Vec<u32> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
        // each undirected edge is listed once
        degree[f[0] as usize] += f[2];
        if f[0] != f[1] {
            degree[f[1] as usize] += f[2];
        }
    }
    assert!(degree.iter().all(|&d| d == 6));
}

#[test]
fn dot_and_json_exports() {
    let o = run(&["graph", "--P", "2", "--p", "5", "--q", "11", "--format", "dot"]);
    assert!(stdout(&o).trim_start().starts_with("graph"));
    let o = run(&["graph", "--P", "2", "--p", "5", "--q", "11", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vertices"], 660);
    assert_eq!(run(&["graph", "--P", "2", "--p", "5", "--q", "11", "--format", "gml"]).status.code(), Some(1));
}

#[test]
fn tree_check_and_norm_classes() {
    let (code, v) = json(&["tree-check", "--P", "3", "--p", "5", "--radius", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["sphere_sizes"], serde_json::json!([1, 6, 30, 150]));
    let (code, v) = json(&["norm-classes", "--P", "2", "--p", "3", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["orbit_count"], 13);
}
