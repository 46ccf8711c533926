use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use torifan::geometry::model_invariants;
use torifan::verify::data::weighted_projective_space;
use torifan::verify::Item;

fn torifan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torifan"))
        .args(args)
        .env_remove("TORIFAN_KS3D")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, content).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const P3_PALP: &str = "3 4\n1 0 0 -1\n0 1 0 -1\n0 0 1 -1\n";
const TWO_EXTREMES: &str = "3 4\n1 0 0 -1\n0 1 0 -1\n0 0 1 -3\n3 4\n1 0 0 -1\n0 1 0 -4\n0 0 1 -6\n";
const BUNDLE_O3: &str = "{\"rays\":[[1,0,0],[0,1,0],[-1,-1,3],[0,0,1],[0,0,-1]],\"cones\":[[0,1,3],[1,2,3],[0,2,3],[0,1,4],[1,2,4],[0,2,4]]}\n";
const BUNDLE_O4: &str = "{\"rays\":[[1,0,0],[0,1,0],[-1,-1,4],[0,0,1],[0,0,-1]],\"cones\":[[0,1,3],[1,2,3],[0,2,3],[0,1,4],[1,2,4],[0,2,4]]}\n";

#[test]
fn analyze_projective_space() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p3.palp", P3_PALP);
    let out = torifan(&["analyze", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let inv = &json(&out)["results"][0]["invariants"];
    assert_eq!(inv["picard_rank"], 1);
    assert_eq!(inv["fano_index"], 4);
    assert_eq!(inv["pseudo_index"], 4);
    assert_eq!(inv["degree"], 64);
}

#[test]
fn polytope_commands() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p3.palp", P3_PALP);
    let dual = torifan(&["dual", s(&f)]);
    assert_eq!(dual.status.code(), Some(0));
    assert_eq!(
        json(&dual)["results"][0]["vertices"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
    let res = torifan(&["resolve", s(&f)]);
    assert_eq!(res.status.code(), Some(0));
    assert_eq!(json(&res)["results"][0]["invariants"]["smooth"], true);
    let nf = torifan(&["normal-form", s(&f)]);
    assert_eq!(nf.status.code(), Some(0));
}

#[test]
fn verify_is_deterministic_across_jobs() {
    let one = torifan(&["verify", "--suite", "mukai", "--jobs", "1"]);
    let four = torifan(&["verify", "--suite", "mukai", "--jobs", "4"]);
    let again = torifan(&["verify", "--suite", "mukai", "--jobs", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
    let r = json(&one);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["schema"], "torifan.report/1");
}

#[test]
fn bounds_without_list_is_skipped() {
    let out = torifan(&["verify", "--suite", "bounds"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "skip");
}

#[test]
fn bounds_with_short_list_fails() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "short.palp", TWO_EXTREMES);
    let out = torifan(&["verify", "--suite", "bound72", "--input", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["status"], "fail");
    let ks = r["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["id"] == "ks3d")
        .unwrap();
    assert_eq!(ks["values"]["parsed"], 2);
    assert_eq!(ks["values"]["max_degree"], 72);
    let failed: Vec<&str> = ks["values"]["failed_checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    // both equality classes are present, so only the whole-list checks fail
    assert!(failed.contains(&"4319 polytopes"));
    assert!(!failed.contains(&"equality exactly on P(1,1,1,3) and P(1,1,4,6)"));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(
        torifan(&["verify", "--suite", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        torifan(&["analyze", "/nonexistent/file"]).status.code(),
        Some(2)
    );
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.palp", "3 2\n1 0\nx y\n");
    assert_eq!(
        torifan(&["dual", "--strict", s(&bad)]).status.code(),
        Some(2)
    );
    let cube = write(
        &dir,
        "cube2.palp",
        "3 8\n0 0 0 0 2 2 2 2\n0 0 2 2 0 0 2 2\n0 2 0 2 0 2 0 2\n",
    );
    assert_eq!(torifan(&["dual", s(&cube)]).status.code(), Some(2));
}

#[test]
fn pipeline_and_search() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "o3.fan.jsonl", BUNDLE_O3);
    let out = torifan(&["pipeline", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"][0];
    assert_eq!(r["base"], "P2");
    assert_eq!(r["m"], 0);
    assert!(json(&out)["input_hash"].as_str().unwrap().len() == 64);

    let g = write(&dir, "o4.fan.jsonl", BUNDLE_O4);
    let out = torifan(&["pipeline", s(&g)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["results"][0]["error"]
        .as_str()
        .unwrap()
        .contains("almost Fano"));

    let out = torifan(&["search", s(&f), "--depth", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"];
    assert_eq!(
        (r["max_rho"].as_u64(), r["max_rho_depth"].as_u64()),
        (Some(8), Some(6))
    );
    let shallow = torifan(&["search", s(&f), "--depth", "3"]);
    assert_eq!(shallow.status.code(), Some(1));
}

#[test]
fn witness_reanalysis_reproduces_invariants() {
    let p = weighted_projective_space(&[1, 1, 2, 4]);
    let inv = model_invariants(&p).unwrap();
    let item = Item::new("x")
        .check("forced", false)
        .with_witness(&p, Some(inv));
    let w = serde_json::to_value(item.witness.as_ref().unwrap()).unwrap();
    let cols: Vec<Vec<i64>> = serde_json::from_value(w["vertices"].clone()).unwrap();
    let mut palp = format!("3 {}\n", cols.len());
    for i in 0..3 {
        let row: Vec<String> = cols.iter().map(|v| v[i].to_string()).collect();
        palp.push_str(&row.join(" "));
        palp.push('\n');
    }
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "witness.palp", &palp);
    let out = torifan(&["analyze", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"][0]["invariants"], w["invariants"]);
}
