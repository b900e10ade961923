use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinwheel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn statuses(v: &Value) -> Vec<String> {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["status"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn generate_level_zero_is_one_tile() {
    let out = run(&["generate", "--level", "0", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], "pinwheel-report/1");
    assert_eq!(v["result"]["tile_count"], 1);
    assert_eq!(v["result"]["tiles"].as_array().unwrap().len(), 1);
}

#[test]
fn generate_level_four_svg_has_625_triangles() {
    let out = run(&["generate", "--level", "4", "--format", "svg"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polygon").count(), 625);
}

#[test]
fn generate_is_byte_identical() {
    let a = run(&["generate", "--level", "3"]);
    let b = run(&["generate", "--level", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generate_respects_the_tile_cap() {
    let out = run(&["generate", "--level", "4", "--max-tiles", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("625"));
}

#[test]
fn files_are_written() {
    let dir = std::env::temp_dir().join(format!("pinwheel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let svg = dir.join("s.svg");
    let report = dir.join("r.json");
    let out = run(&[
        "generate",
        "--level",
        "2",
        "--format",
        "svg",
        "--out",
        svg.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polygon").count(), 25);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["out"], svg.to_str().unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_kernel_runs_only_lattice_checks() {
    let out = run(&["verify", "--suite", "kernel", "--seed", "7", "--samples", "300"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["suites"], serde_json::json!(["kernel"]));
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["suite"], "kernel");
    }
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["result"]["verify_config"]["seed"], 7);
    assert_eq!(v["result"]["verify_config"]["criterion_samples"], 300);
}

#[test]
fn tampered_q_fails_with_witness() {
    let out = run(&["verify", "--suite", "kernel", "--tamper-q"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    let c = &v["checks"][0];
    assert_eq!(c["status"], "fail");
    assert!(!c["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn ktheory_kernel_report() {
    let out = run(&["ktheory", "--check", "kernel"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["kernel"]["rank"], 7);
    assert_eq!(v["result"]["kernel"]["equality"], true);
    assert!(v["result"].get("pairing").is_none());
}

#[test]
fn bad_epsilon_is_rejected() {
    let out = run(&["pairing", "--epsilon", "z^4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pairing_with_z_squared() {
    let out = run(&["pairing", "--epsilon", "z2", "--no-timings"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["l"], 1);
    let entries = v["result"]["pairing"].as_array().unwrap();
    assert_eq!(entries.len(), 6);
    for e in entries {
        assert_eq!(e["l"], 1);
        let value = e["value"].as_str().unwrap();
        let (p, q) = value.split_once('/').unwrap();
        assert!(p.parse::<u64>().is_ok() && q.parse::<u64>().is_ok());
        assert_eq!(e["in_module"], true);
    }
    assert!(statuses(&v).iter().all(|s| s == "pass"));
}

#[test]
fn collared_catalog_has_counts() {
    let out = run(&["collared", "--depth", "6"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["count"], 108);
    assert_eq!(v["result"]["count_up_to_reflection"], 54);
    for c in v["result"]["classes"].as_array().unwrap() {
        assert!(c["count"].as_u64().unwrap() > 0);
    }
}

#[test]
fn frequencies_report_schema() {
    let dir = std::env::temp_dir().join(format!("pinwheel-freq-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("f.json");
    let out = run(&[
        "frequencies",
        "--depth",
        "1",
        "--oracle-level",
        "6",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema"], "pinwheel-report/1");
    assert_eq!(v["config"]["oracle_level"], 6);
    assert_eq!(v["result"]["module"]["depth"], 1);
    assert!(v["result"]["module"]["generator"].as_str().unwrap().contains('/'));
    for e in v["result"]["frequencies"].as_array().unwrap() {
        for field in ["key_hash", "freq", "k_min", "in_module"] {
            assert!(e.get(field).is_some(), "{field}");
        }
    }
    assert_eq!(v["result"]["collared"].as_array().unwrap().len(), 108);
    std::fs::remove_dir_all(&dir).unwrap();
}
