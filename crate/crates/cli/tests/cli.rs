use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lmsb(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lmsb"));
    cmd.args(args).env_remove("LMSB_CACHE_DIR");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn projective_plane_yukawa_json() {
    let out = stdout(&lmsb(&["yukawa", "--model", "p2", "--format", "json"], None));
    assert_eq!(out.trim(), r#"{"(z,z;z)":"-1/(3*(1+27*z))"}"#);
}

#[test]
fn f0_relations() {
    let out = stdout(&lmsb(&["relations", "--model", "f0", "--format", "json"], None));
    assert_eq!(out.trim(), "[[-2,1,0,1,0],[-2,0,1,0,1]]");
}

#[test]
fn projective_plane_mirror_coordinate() {
    let out = stdout(&lmsb(&["solutions", "--model", "p2", "--order", "3"], None));
    let t = out.lines().find(|l| l.starts_with("t ")).expect("t row");
    assert!(t.ends_with("log(z) - 6*z+45*z^2-560*z^3 + O(4)"), "{t}");
}

#[test]
fn json_output_is_deterministic() {
    for args in [["gw0", "--model", "f1"], ["pf-ops", "--model", "f2"], ["solutions", "--model", "f0"]] {
        let mut full = args.to_vec();
        full.extend(["--format", "json", "--order", "6"]);
        let a = lmsb(&full, None);
        let b = lmsb(&full, None);
        assert_eq!(stdout(&a), stdout(&b));
        serde_json::from_slice::<Value>(&a.stdout).expect("valid JSON");
    }
}

#[test]
fn cache_hit_matches_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gw0", "--model", "p2", "--order", "8", "--format", "json"];
    let fresh = stdout(&lmsb(&args, None));
    let first = stdout(&lmsb(&args, Some(dir.path())));
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let second = stdout(&lmsb(&args, Some(dir.path())));
    assert_eq!(fresh, first);
    assert_eq!(first, second);

    // A corrupt entry is recomputed and replaced.
    let path = entries.into_iter().next().unwrap().unwrap().path();
    std::fs::write(&path, "garbage").unwrap();
    assert_eq!(stdout(&lmsb(&args, Some(dir.path()))), fresh);
    let repaired: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(repaired["payload"], serde_json::from_str::<Value>(&fresh).unwrap());
}

#[test]
fn no_cache_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let o = Command::new(env!("CARGO_BIN_EXE_lmsb"))
        .args(["yukawa", "--model", "f0", "--no-cache"])
        .env("LMSB_CACHE_DIR", &cache)
        .output()
        .unwrap();
    stdout(&o);
    assert!(!cache.exists());
}

#[test]
fn environment_selects_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lmsb"))
        .args(["relations", "--model", "f1"])
        .env("LMSB_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    stdout(&o);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn errors_are_structured() {
    let o = lmsb(&["yukawa", "--model", "nope"], None);
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "unknown-model");

    let o = lmsb(&["genus2", "--model", "f0"], None);
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "missing-ambiguity");

    assert!(!lmsb(&["yukawa", "--bogus"], None).status.success());
}

#[test]
fn custom_polytope_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    std::fs::write(&path, r#"{"dim":2,"vertices":[[1,0],[0,1],[-1,0],[0,-1]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let poly: Value = serde_json::from_str(&stdout(&lmsb(&["polytope", "--input", p, "--format", "json"], None))).unwrap();
    assert_eq!(poly["reflexive"], true);
    assert_eq!(poly["normalized_volume"], 4);
    let rel: Value = serde_json::from_str(&stdout(&lmsb(&["relations", "--input", p, "--format", "json"], None))).unwrap();
    assert_eq!(rel.as_array().unwrap().len(), 2);
}

#[test]
fn supplied_ambiguity_enables_genus_two() {
    let out = stdout(&lmsb(&["genus2", "--model", "f0", "--order", "4", "--f2", "0", "--format", "json"], None));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["amplitude"]["g"], 2);
}

#[test]
fn check_passes() {
    let o = lmsb(&["check", "--order", "10", "--format", "json"], None);
    let rows: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["passed"] == true));
    assert!(o.status.success());
}
