use std::path::Path;

use cdt_cli::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["cdt"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn ring_index(dir: &Path, tether: &str) -> String {
    let p = dir.join(format!("ring-{tether}.json"));
    let p = p.to_str().unwrap().to_string();
    let (code, _, err) = run(&["tcs", "ring", "--anchor", "0.5,1.5", "--tether", tether, "-o", &p]);
    assert_eq!(code, 0, "{err}");
    p
}

fn maps_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/maps"))
}

#[test]
fn utpp_ring_cost() {
    let v = json(&["--json", "utpp", "ring", "--anchor", "0.5,1.5", "--start", "0.5,1.5", "--goal", "2.5,1.5"]);
    let c = v["cost"].as_f64().unwrap();
    assert!((c - (1.0 + 2f64.sqrt())).abs() < 1e-6, "{c}");
    assert_eq!(v["path"].as_array().unwrap().len(), 4);
}

#[test]
fn map_files_match_builtins() {
    for name in ["square", "l-shape", "ring", "two-obstacles", "l-corridor", "cluttered"] {
        let file = maps_dir().join(format!("{name}.json"));
        let a = json(&["--json", "dissect", file.to_str().unwrap()]);
        let b = json(&["--json", "dissect", name]);
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn foc_empty_under_short_tether() {
    let dir = tempfile::tempdir().unwrap();
    let idx = ring_index(dir.path(), "2.2");
    let v = json(&["--json", "foc", &idx, "--goal", "2.5,1.5"]);
    assert_eq!(v["configs"].as_array().unwrap().len(), 0);
    let idx = ring_index(dir.path(), "4");
    let v = json(&["--json", "foc", &idx, "--goal", "2.5,1.5"]);
    assert_eq!(v["configs"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let idx = ring_index(dir.path(), "2.2");
    assert_eq!(run(&["tpp", &idx, "--config", "bad", "--goal", "2.5,1.5"]).0, 1);
    assert_eq!(run(&["tpp", &idx, "--config", "0.5,1.5", "--goal", "2.5,1.5"]).0, 2);
    assert_eq!(run(&["tpp", &idx, "--config", "0.5,1.5", "--goal", "1.5,1.5"]).0, 1);
    assert_eq!(run(&["tmv", &idx, "--config", "0.5,1.5", "--targets", "2.5,1.5"]).0, 2);
    assert_eq!(run(&["tcs", "ring", "--anchor", "1.5,1.5", "--tether", "4", "-o", "unused.json"]).0, 1);
    assert_eq!(run(&["tcs", "ring", "--anchor", "0.5,1.5", "--tether", "-1", "-o", "unused.json"]).0, 1);
    assert_eq!(run(&["dissect", "no-such-map"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    let bogus = dir.path().join("bogus.json");
    std::fs::write(&bogus, "{\"environment\": 3}").unwrap();
    assert_eq!(run(&["foc", bogus.to_str().unwrap(), "--goal", "1,1"]).0, 1);
}

#[test]
fn encoding_cap_is_infeasible() {
    let (code, _, err) =
        run(&["tcs", "cluttered", "--anchor", "0.5,0.5", "--tether", "40", "--max-encodings", "10", "-o", "unused.json"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let idx = ring_index(dir.path(), "6");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--json", "--no-timing", "foc", &idx, "--goal", "2.5,0.5"],
        vec!["--json", "--no-timing", "tmv", &idx, "--config", "0.5,1.5;0.7,2.6", "--targets", "2.5,1.5;2.5,0.5"],
        vec!["--json", "--no-timing", "bench", "two-obstacles", "--reps", "2"],
        vec!["--no-timing", "bench", "ring", "--reps", "1"],
    ];
    for args in cases {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.0, 0, "{}", a.2);
        assert_eq!(a.1, b.1);
    }
}

#[test]
fn svg_is_xml() {
    let dir = tempfile::tempdir().unwrap();
    let idx = ring_index(dir.path(), "6");
    let svg = dir.path().join("foc.svg");
    let (code, _, err) = run(&["foc", &idx, "--goal", "2.5,1.5", "--svg", svg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let configs = doc.descendants().filter(|n| n.attribute("class") == Some("config")).count();
    assert!(configs >= 2);
    assert_eq!(doc.root_element().tag_name().name(), "svg");
}

#[test]
fn bench_single_cell() {
    let v = json(&["--json", "bench", "square", "--reps", "3"]);
    assert_eq!(v["cellCount"], 1);
    assert_eq!(v["tasks"][0]["encodingCount"], 1);
    assert!(v["tasks"][0]["ms"]["median"].as_f64().unwrap() >= 0.0);
    assert_eq!(run(&["bench", "square", "--reps", "0"]).0, 1);
}

#[test]
fn bench_task_file() {
    let dir = tempfile::tempdir().unwrap();
    let tasks = dir.path().join("tasks.json");
    std::fs::write(
        &tasks,
        r#"[{"kind":"tpp","startConfig":[[0.5,1.5]],"goals":[[2.5,1.5],[2.5,2.5]]},
            {"kind":"utpp","start":[0.5,0.5],"goals":[[2.5,2.5]]}]"#,
    )
    .unwrap();
    let t = tasks.to_str().unwrap();
    let v = json(&["--json", "--no-timing", "bench", "ring", "--tasks", t, "--anchor", "0.5,1.5", "--tether", "4", "--reps", "2"]);
    assert_eq!(v["tasks"][0]["feasible"], 2);
    assert!(v["tasks"][0].get("ms").is_none());
    let c = v["tasks"][1]["totalCost"].as_f64().unwrap();
    // Around the hole through one of its corners.
    assert!((c - 10f64.sqrt()).abs() < 1e-6, "{c}");
    std::fs::write(&tasks, r#"[{"kind":"tpp","goals":[[2.5,1.5]]}]"#).unwrap();
    assert_eq!(run(&["bench", "ring", "--tasks", t, "--reps", "1"]).0, 1);
}

#[test]
fn index_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let idx = ring_index(dir.path(), "6");
    let text = std::fs::read_to_string(&idx).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let copy = dir.path().join("copy.json");
    std::fs::write(&copy, serde_json::to_string(&v).unwrap()).unwrap();
    let a = json(&["--json", "foc", &idx, "--goal", "2.5,0.5"]);
    let b = json(&["--json", "foc", copy.to_str().unwrap(), "--goal", "2.5,0.5"]);
    assert_eq!(a, b);
    let mut broken = v.clone();
    broken["encodingCount"] = Value::from(v["encodingCount"].as_u64().unwrap() + 1);
    std::fs::write(&copy, serde_json::to_string(&broken).unwrap()).unwrap();
    assert_eq!(run(&["foc", copy.to_str().unwrap(), "--goal", "2.5,0.5"]).0, 1);
}
