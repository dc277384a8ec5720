use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn dynlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynlab"))
        .args(args)
        .env_remove("DYNLAB_ELEMENT_CAP")
        .env_remove("DYNLAB_CONFIG")
        .env_remove("DYNLAB_GOLDEN_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn analyze(name: &str) -> (i32, Value) {
    let out = dynlab(&["analyze", data(name).to_str().unwrap()]);
    (out.status.code().unwrap(), json(&out))
}

#[test]
fn identity_flow_is_distal() {
    let (code, v) = analyze("identity.flow");
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdicts"]["distal"], true);
    assert_eq!(v["verdicts"]["weakly_distal"], true);
    assert_eq!(v["monoid"]["size"], 1);
    assert_eq!(v["relations"]["distal"]["pairs"].as_array().unwrap().len(), 6);
    assert_eq!(v["all_passed"], true);
}

#[test]
fn constant_maps_give_a_proximal_flow() {
    let (code, v) = analyze("constants.flow");
    assert_eq!(code, 0);
    assert_eq!(v["verdicts"]["proximal_flow"], true);
    assert_eq!(v["verdicts"]["p_equals_sp"], true);
    assert_eq!(v["monoid"]["minimal_ideals"].as_array().unwrap().len(), 1);
    assert_eq!(v["relations"]["strongly_proximal"]["pairs"].as_array().unwrap().len(), 9);
}

#[test]
fn two_ideal_model_reports_the_failing_check() {
    let out = dynlab(&["analyze", data("morse.flow").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["monoid"]["minimal_ideals"].as_array().unwrap().len(), 2);
    assert_eq!(v["verdicts"]["p_equivalence"], false);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["uA ⊆ A for every minimal idempotent u"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("check failed: uA ⊆ A"), "{err}");
}

#[test]
fn parse_error_exits_2() {
    let out = dynlab(&["analyze", data("bad.flow").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_file_exits_2() {
    let out = dynlab(&["analyze", data("nope.flow").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn element_cap_from_env_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_dynlab"))
        .args(["analyze", data("cycle.flow").to_str().unwrap()])
        .env("DYNLAB_ELEMENT_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("monoid too large"));
}

#[test]
fn cap_flag_beats_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_dynlab"))
        .args(["analyze", data("identity.flow").to_str().unwrap(), "--cap", "100"])
        .env("DYNLAB_ELEMENT_CAP", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn fuzz_rejects_zero_count() {
    let out = dynlab(&["fuzz", "--count", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn fuzz_flows_suite_passes_and_is_deterministic() {
    let args = ["fuzz", "--count", "30", "--seed", "7", "--max-states", "5", "--suite", "flows"];
    let a = dynlab(&args);
    let b = dynlab(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["suites"][0]["checked"].as_u64().unwrap() + v["suites"][0]["skipped"].as_u64().unwrap(), 30);
    assert_eq!(v["config"]["max_states"], 5);
}

#[test]
fn reproduce_matches_goldens() {
    for ex in ["mt", "chacon", "ternary", "cc"] {
        let out = dynlab(&["reproduce", ex]);
        assert_eq!(out.status.code(), Some(0), "{ex}: {}", String::from_utf8_lossy(&out.stderr));
        let golden = std::fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join(format!("{ex}.json"))).unwrap();
        assert_eq!(out.stdout, golden, "{ex}");
    }
}

#[test]
fn reproduce_reports_a_mismatch() {
    let dir = std::env::temp_dir().join(format!("dynlab-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("chacon.json"), "{}\n").unwrap();
    let out = dynlab(&["reproduce", "chacon", "--golden-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("    1 - {}"), "{err}");

    let out = dynlab(&["reproduce", "chacon", "--bless", "--golden-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = dynlab(&["reproduce", "chacon", "--golden-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reproduce_without_golden_fails() {
    let dir = std::env::temp_dir().join(format!("dynlab-empty-{}", std::process::id()));
    let out = dynlab(&["reproduce", "mt", "--golden-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bless"));
}

#[test]
fn classify_morse_pair() {
    let v = json(&dynlab(&["classify-pair", "--system", "morse", "--x", "a", "--y", "b"]));
    assert_eq!(v["classification"]["proximal"], "evidence-p");
    assert_eq!(v["classification"]["witness"]["outcome"]["t"], 8);
    let v = json(&dynlab(&["classify-pair", "--system", "morse", "--x", "a", "--y", "abar"]));
    assert_eq!(v["classification"]["proximal"], "proven-d");
}

#[test]
fn classify_uses_config_file_params() {
    let cfg = std::env::temp_dir().join(format!("dynlab-cfg-{}.toml", std::process::id()));
    std::fs::write(&cfg, "depth = 4\ngap = 729\nhorizon = 6561\n").unwrap();
    let out = dynlab(&["--config", cfg.to_str().unwrap(), "classify-pair", "--system", "chacon", "--x", "x1", "--y", "x2"]);
    std::fs::remove_file(&cfg).unwrap();
    let v = json(&out);
    assert_eq!(v["classification"]["params"]["gap"], 729);
    assert_eq!(v["classification"]["witness"]["outcome"]["t"], -5);
    assert_eq!(v["classification"]["syndetic"]["outcome"]["type"], "gap_violation");
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg = std::env::temp_dir().join(format!("dynlab-badcfg-{}.toml", std::process::id()));
    std::fs::write(&cfg, "depht = 4\n").unwrap();
    let out = dynlab(&["--config", cfg.to_str().unwrap(), "reproduce", "mt"]);
    std::fs::remove_file(&cfg).unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_ternary_and_circles() {
    let v = json(&dynlab(&["classify-pair", "--system", "ternary", "--x", "0", "--y", "z"]));
    assert_eq!(v["classification"]["label"], "in-sp");
    let v = json(&dynlab(&["classify-pair", "--system", "ternary", "--x", "1", "--y", "z"]));
    assert_eq!(v["classification"]["label"], "not-in-sp");
    assert_eq!(v["classification"]["pair_type"], "opposed");

    let v = json(&dynlab(&["classify-pair", "--system", "cc", "--x", "C2:1.0", "--y", "C4:2.0"]));
    assert_eq!(v["label"], "evidence-p");
    assert_eq!(v["table_in_p"], true);
    let v = json(&dynlab(&["classify-pair", "--system", "cc", "--x", "C2:1.0", "--y", "C3:1.0"]));
    assert_eq!(v["label"], "evidence-d");
    assert_eq!(v["table_in_p"], false);
}

#[test]
fn text_format_and_out_file() {
    let path = std::env::temp_dir().join(format!("dynlab-out-{}.txt", std::process::id()));
    let out = dynlab(&["--format", "text", "--out", path.to_str().unwrap(), "analyze", data("identity.flow").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.contains("distal: P = Δ"), "{text}");
}

#[test]
fn trajectory_csv() {
    let out = dynlab(&["trajectory", "--point", "C3:0.5", "--steps", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iteration,tier,angle,radius");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,C3,"));
    assert!(lines[2].starts_with("1,C1,"));
}
