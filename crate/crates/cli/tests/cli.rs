use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn covalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn shift_c3_validates() {
    let out = covalg(&["validate", "gallery:shift-c3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["command"], "validate");
    assert_eq!(r["seed"], 0);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["fingerprint"].as_str().unwrap().len(), 64);
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for c in checks {
        if let Some(x) = c["residual"].as_f64() {
            assert!(x >= 0.0);
        }
    }
}

#[test]
fn build_reports_blocks() {
    let out = covalg(&["build", "gallery:shift-c3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    let blocks = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "build.blocks")
        .unwrap();
    assert!(blocks["certificate"].as_str().unwrap().starts_with("blocks [3]"));

    let out = covalg(&["build", "gallery:zero-ideal"]);
    let r = report(&out);
    let cert = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "build.blocks")
        .unwrap()["certificate"]
        .as_str()
        .unwrap()
        .to_string();
    assert!(cert.starts_with("blocks [1, 2]"), "{cert}");
}

#[test]
fn unbounded_chain_takes_the_l_level_path() {
    let out = covalg(&["build", "gallery:swap-c2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    let names: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"build.l_level_only"));

    let out = covalg(&["pv", "gallery:swap-c2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("does not terminate"));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        ["pv", "gallery:shift-c4", "--seed", "7"],
        ["toeplitz", "gallery:shift-c2", "--seed", "7"],
        ["structure", "gallery:m2-weights", "--seed", "7"],
    ] {
        let a = covalg(&args);
        let b = covalg(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = covalg(&["validate", "gallery:shift-c3", "--seed", "1"]);
    let b = covalg(&["validate", "gallery:shift-c3", "--seed", "2"]);
    assert_eq!(report(&a)["fingerprint"], report(&b)["fingerprint"]);
    assert_eq!(report(&b)["seed"], 2);
}

#[test]
fn weights_zero_two_are_not_semisaturated() {
    let out = covalg(&["structure", &fixture("m2-weights-02.json")]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let check = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "structure.semisaturated")
        .unwrap();
    assert_eq!(check["status"], "fail");
    assert_eq!(check["certificate"], "not semi-saturated at n = 2");
}

#[test]
fn structure_needs_weights() {
    let out = covalg(&["structure", "gallery:shift-c2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("weights"));
}

#[test]
fn malformed_block_map_names_blocks() {
    let out = covalg(&["validate", &fixture("malformed-sigma.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("block 0") && err.contains("1"), "{err}");
}

#[test]
fn non_unitary_reports_residual() {
    let out = covalg(&["validate", &fixture("non-unitary.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("residual"), "{}", stderr(&out));
}

#[test]
fn unknown_fields_are_rejected_with_position() {
    let out = covalg(&["validate", &fixture("unknown-field.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("orientation") && err.contains("line 7"), "{err}");
}

#[test]
fn gallery_lists_and_runs() {
    let out = covalg(&["gallery"]);
    assert_eq!(out.status.code(), Some(0));
    let listing: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = listing["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    for expected in [
        "shift-c2",
        "shift-c6",
        "zero-ideal",
        "m2-weights",
        "dual-shift-c3",
        "toeplitz-c2",
    ] {
        assert!(names.contains(&expected), "{expected}");
    }
    for name in names {
        let out = covalg(&["gallery", name]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
    let out = covalg(&["gallery", "shift-c3.json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = covalg(&["gallery", "no-such-system"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pretty_output_is_a_table() {
    let out = covalg(&["pv", "gallery:shift-c4", "--pretty"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("pv.exact_at_a") && l.contains("pass")));
    assert!(text.contains("pv.matrix.f"));
}

#[test]
fn level_override_below_the_bound_is_an_error() {
    let out = covalg(&["build", "gallery:shift-c4", "--max-level", "1"]);
    assert_ne!(out.status.code(), Some(0));
}
