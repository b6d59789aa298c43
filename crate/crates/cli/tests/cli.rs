use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kvc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kvc"))
        .args(args)
        .env_remove("KVCOHOM_BUDGET")
        .output()
        .expect("kvc runs")
}

fn workdir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&d).unwrap();
    d
}

/// Writes a fixture into `dir` and returns its path.
fn fixture(dir: &Path, name: &str) -> String {
    let out = kvc(&["fixtures", name]);
    assert_eq!(out.status.code(), Some(0), "{name}");
    let p = dir.join(format!("{name}.json"));
    std::fs::write(&p, &out.stdout).unwrap();
    p.display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn verify_and_cohomology_on_aff() {
    let d = workdir("aff");
    let aff = fixture(&d, "aff");
    let out = kvc(&["verify", &aff]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["format_version"], 1);
    assert_eq!(r["verb"], "verify");
    assert_eq!(r["verdict"], true);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let r = json(&kvc(&["cohomology", &aff, "--q-max", "2"]));
    assert_eq!(r["results"]["dims_h"][0], 0);

    let r = json(&kvc(&["jacobi", &aff]));
    assert_eq!(r["results"]["jacobi"]["basis"], serde_json::json!([["1", "0"]]));
    assert_eq!(r["results"]["center"]["basis"], serde_json::json!([]));
}

#[test]
fn non_kv_algebra_exits_one_with_witness() {
    let d = workdir("nonkv");
    // e1 e1 = e2, e2 e1 = e1.
    let bad = write(
        &d,
        "bad.json",
        r#"{"dim": 2, "product": [[["0","1"],["0","0"]],[["1","0"],["0","0"]]]}"#,
    );
    let out = kvc(&["verify", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["verdict"], false);
    assert!(r["results"]["witness"].is_array());
    assert_eq!(kvc(&["cohomology", &bad]).status.code(), Some(1));
}

#[test]
fn input_and_budget_errors() {
    let d = workdir("errors");
    let junk = write(&d, "junk.json", "{ not json");
    assert_eq!(kvc(&["verify", &junk]).status.code(), Some(2));
    assert_eq!(kvc(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(kvc(&["fixtures", "nope"]).status.code(), Some(2));
    assert_eq!(kvc(&["frobnicate"]).status.code(), Some(2));
    let aff = fixture(&d, "aff");
    assert_eq!(kvc(&["--budget", "10", "cohomology", &aff]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_kvc"))
        .args(["cohomology", &aff])
        .env("KVCOHOM_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn deformation_verbs() {
    let d = workdir("deform");
    let jet = fixture(&d, "aff-s10-jet");
    let r = json(&kvc(&["deform-check", &jet]));
    assert_eq!(r["verdict"], true);
    assert_eq!(r["results"]["residual_zero"][0], true);
    let out = kvc(&["deform-solve", &jet, "--orders", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["steps"].as_array().unwrap().len(), 2);

    let aff = fixture(&d, "aff");
    let r = json(&kvc(&["rigidity", &aff]));
    assert_eq!(r["results"]["rigid"], false);
    let s = fixture(&d, "aff-s10");
    let r = json(&kvc(&["curvature-check", &aff, "--s", &s]));
    assert_eq!(r["results"]["commutator_formula_holds"], true);
}

#[test]
fn extension_verbs() {
    let d = workdir("ext");
    let aff = fixture(&d, "aff");
    let s = fixture(&d, "aff-s10");
    let out = kvc(&["extend-algebra", &aff, "--cochain", &s]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["is_kv"], true);

    // The zero cocycle on A (+) W, with W = V = regular AFF.
    let zeros = vec!["\"0\""; 32].join(",");
    let f = write(
        &d,
        "zero.json",
        &format!(r#"{{"degree": 2, "arg_dim": 4, "value_dim": 2, "values": [{zeros}]}}"#),
    );
    let out = kvc(&["extend-module", "--w", &aff, "--v", &aff, "--cochain", &f]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["exact"], true);
    let r = json(&kvc(&["classify-ext", "--w", &aff, "--v", &aff, "--f", &f, "--g", &f]));
    assert_eq!(r["results"]["equivalent"], true);
}

#[test]
fn graded_verbs() {
    let d = workdir("graded");
    let g = fixture(&d, "poly-graded");
    let pair = fixture(&d, "poly-pair");
    let r = json(&kvc(&["graded-check", &g]));
    assert_eq!(r["verdict"], true);
    let out = kvc(&["connectionlike", &g, "--pair", &pair]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["exact"], false);
}

#[test]
fn aff_suite_and_radiant() {
    let r = json(&kvc(&["aff-suite"]));
    assert_eq!(r["verdict"], true);
    assert_eq!(r["results"]["suites"].as_array().unwrap().len(), 3);
    let out = kvc(&["aff-suite", "--alpha", "1/3", "--beta", "-2"]);
    assert_eq!(out.status.code(), Some(0));

    let d = workdir("radiant");
    let m = fixture(&d, "radiant2-module");
    let g = fixture(&d, "radiant2-parallel");
    let r = json(&kvc(&["radiant", &m, "--cochain", &g]));
    assert_eq!(r["verdict"], true);
    assert_eq!(r["results"]["primitives"][0]["theta"]["values"], serde_json::json!(["0", "1"]));
    let aff = fixture(&d, "aff");
    assert_eq!(kvc(&["radiant", &aff]).status.code(), Some(1));
}

#[test]
fn geodesic_csv_and_summary() {
    let out = kvc(&["geodesic", "--alpha", "2", "--t1", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,vx,vy"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!((last[1] - 2f64.ln()).abs() < 1e-8);

    let r = json(&kvc(&["geodesic", "--alpha", "2", "--t1", "-3", "--summary"]));
    assert_eq!(r["results"]["termination"]["kind"], "blow-up");
    let t_star = r["results"]["termination"]["t_star"].as_f64().unwrap();
    assert!((t_star + 1.0).abs() <= 1e-6);
}

#[test]
fn proptest_verb() {
    let out = kvc(&["proptest", "--seed", "0", "--count", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["failures"], serde_json::json!([]));
    let out = kvc(&["proptest", "--seed", "0", "--count", "5", "--mutant"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["results"]["failures"][0]["invariant"], "delta-squared");
}

#[test]
fn reports_are_byte_identical() {
    let d = workdir("determinism");
    let aff = fixture(&d, "aff");
    for args in [
        vec!["cohomology", aff.as_str(), "--q-max", "2"],
        vec!["proptest", "--seed", "7", "--count", "2"],
        vec!["aff-suite"],
    ] {
        assert_eq!(kvc(&args).stdout, kvc(&args).stdout, "{args:?}");
    }
    let out = d.join("out.json");
    let o = out.display().to_string();
    assert_eq!(kvc(&["--output", &o, "rigidity", &aff]).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), kvc(&["rigidity", &aff]).stdout);
}

#[test]
fn fixture_list_and_round_trip() {
    let out = kvc(&["fixtures"]);
    let names: Vec<String> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(names.iter().any(|n| n == "aff"));
    let d = workdir("fixtures");
    for n in &names {
        let p = fixture(&d, n);
        assert!(std::fs::metadata(&p).unwrap().len() > 0);
    }
    let z = fixture(&d, "zero2");
    let r = json(&kvc(&["verify", &z]));
    assert_eq!(r["verdict"], true);
}
