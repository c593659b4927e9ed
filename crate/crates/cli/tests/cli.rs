use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use treeretract::counterexample::mutations;
use treeretract::gaction::{FiniteGroup, GSet};
use treeretract::ggraph::GGraph;
use treeretract::io::{GSetDoc, GroupSpec, InstanceDoc, ModuleDoc, ModuleInstanceDoc, DerivationDoc, UntwistDoc};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeretract")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_json<T: serde::Serialize>(dir: &TempDir, name: &str, value: &T) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

/// Centre 0 with leaves 1, 2 swapped by C2.
fn swapped_star() -> GGraph {
    let g = FiniteGroup::cyclic(2);
    let vs = GSet::from_generator_action(&g, 3, &[vec![0, 2, 1]]).unwrap();
    let es = GSet::from_generator_action(&g, 2, &[vec![1, 0]]).unwrap();
    GGraph::new(vs, es, vec![0, 0], vec![1, 2]).unwrap()
}

#[test]
fn stallings_examples() {
    let o = run(&["stallings", "core", "x^2,y^2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("3 vertices, 4 edges"));
    assert_eq!(stdout(&run(&["stallings", "member", "x^2,y^2", "xy"])).trim(), "false");
    assert_eq!(stdout(&run(&["stallings", "census", "x^2,y^2", "x^2y^2x^2"])).trim(), "{base}");
    let o = run(&["--report", "json", "stallings", "core", "x^4,xyx,y^4"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["vertices"].as_u64(), v["edges"].as_u64()), (Some(7), Some(9)));
}

#[test]
fn stallings_parse_error_exits_2() {
    assert_eq!(run(&["stallings", "member", "x^2,y^", "x"]).status.code(), Some(2));
    assert_eq!(run(&["stallings", "census", "x^2,y^2", "x^-1yx"]).status.code(), Some(2));
}

#[test]
fn retract_single_edge() {
    let dir = TempDir::new().unwrap();
    let tree = GGraph::plain(2, &[(0, 1)]).unwrap();
    let input = write_json(&dir, "in.json", &InstanceDoc::new(&tree, &BTreeSet::from([0])));
    let out = dir.path().join("out.json");
    let o = run(&["--report", "json", "--out", out.to_str().unwrap(), "retract", "run", &input]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["tree"]["vertices"]["size"], 1);
    assert_eq!(v["validated"], true);
}

#[test]
fn retract_not_action_closed_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = write_json(&dir, "in.json", &InstanceDoc::new(&swapped_star(), &BTreeSet::from([0, 1])));
    assert_eq!(run(&["retract", "run", &input]).status.code(), Some(3));
}

#[test]
fn retract_schema_violation_exits_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"group":{"kind":"trivial"}}"#).unwrap();
    assert_eq!(run(&["retract", "run", path.to_str().unwrap()]).status.code(), Some(2));
    let mut doc = InstanceDoc::new(&swapped_star(), &BTreeSet::from([0]));
    doc.ggraph.iota = vec![0, 1];
    let input = write_json(&dir, "neq.json", &doc);
    assert_eq!(run(&["retract", "run", &input]).status.code(), Some(2));
}

#[test]
fn batch_is_deterministic() {
    let a = run(&["--seed", "5", "--report", "json", "retract", "batch", "--count", "20"]);
    let b = run(&["--seed", "5", "--report", "json", "retract", "batch", "--count", "20"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--seed", "6", "--report", "json", "retract", "batch", "--count", "20"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn generated_instance_runs() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("inst.json");
    let p = path.to_str().unwrap();
    assert!(run(&["--seed", "9", "--out", p, "retract", "generate"]).status.success());
    assert!(run(&["retract", "run", p, "--trace"]).status.success());
}

#[test]
fn counterexample_verify() {
    let o = run(&["counterexample", "verify", "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["--report", "json", "counterexample", "verify", "--n-max", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c.get("name").is_some() && c.get("pass") == Some(&serde_json::Value::Bool(true))));
    let o = run(&["counterexample", "verify", "--part", "schreier", "--n-max", "2"]);
    assert!(stdout(&o).contains("schreier_twisted n=1: expected {}, computed {}"));
}

#[test]
fn mutated_fixture_exits_1() {
    let dir = TempDir::new().unwrap();
    for (i, (_, data)) in mutations().into_iter().enumerate() {
        let path = write_json(&dir, &format!("m{i}.json"), &data);
        assert_eq!(run(&["counterexample", "verify", "--n-max", "4", "--fixture", &path]).status.code(), Some(1));
    }
}

#[test]
fn moves_commands() {
    let dir = TempDir::new().unwrap();
    let path = GGraph::plain(3, &[(0, 1), (1, 2)]).unwrap();
    let input = write_json(&dir, "path.json", &InstanceDoc::new(&path, &BTreeSet::new()));
    let o = run(&["moves", "slide", &input, "--edge", "0", "--along", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("tree: true"));
    let o = run(&["--report", "json", "moves", "compress", &input, "--keep", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ggraph"]["vertices"]["size"], 2);
    let o = run(&["--report", "json", "moves", "subdivide", &input, "--edge", "0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ggraph"]["vertices"]["size"], 4);
    assert_eq!(run(&["moves", "slide", &input, "--edge", "0", "--along", "0"]).status.code(), Some(3));
    assert_eq!(run(&["moves", "slide", &input, "--edge", "9", "--along", "0"]).status.code(), Some(2));
}

fn module_doc(values: Vec<Vec<i64>>) -> ModuleInstanceDoc {
    ModuleInstanceDoc {
        group: GroupSpec::Cyclic { n: 2 },
        module: ModuleDoc { factors: vec![2, 2], generators: vec![vec![vec![0, 1], vec![1, 0]]] },
        derivation: Some(DerivationDoc { values }),
    }
}

#[test]
fn almost_check_derivation() {
    let dir = TempDir::new().unwrap();
    let good = write_json(&dir, "good.json", &module_doc(vec![vec![0, 0], vec![1, 1]]));
    let o = run(&["almost", "check-derivation", &good]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("derivation: true"));
    let bad = write_json(&dir, "bad.json", &module_doc(vec![vec![0, 0], vec![1, 0]]));
    assert_eq!(run(&["almost", "check-derivation", &bad]).status.code(), Some(1));
    let short = write_json(&dir, "short.json", &module_doc(vec![vec![0, 0]]));
    assert_eq!(run(&["almost", "check-derivation", &short]).status.code(), Some(2));
}

#[test]
fn almost_untwist() {
    let dir = TempDir::new().unwrap();
    let regular = GSetDoc { size: 2, generators: vec![vec![1, 0]] };
    let doc = UntwistDoc { group: GroupSpec::Cyclic { n: 2 }, e: regular.clone(), a: regular, transversal: vec![0], phi: vec![0, 0] };
    let input = write_json(&dir, "u.json", &doc);
    let o = run(&["--report", "json", "almost", "untwist", &input]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["hat"], serde_json::json!([0, 1]));
    assert_eq!(v["round_trip"], true);

    let fixed = GSetDoc { size: 1, generators: vec![vec![0]] };
    let swap = GSetDoc { size: 2, generators: vec![vec![1, 0]] };
    let doc = UntwistDoc { group: GroupSpec::Cyclic { n: 2 }, e: fixed, a: swap, transversal: vec![0], phi: vec![0] };
    let input = write_json(&dir, "bad.json", &doc);
    assert_eq!(run(&["almost", "untwist", &input]).status.code(), Some(3));
}

#[test]
fn missing_file_exits_2() {
    assert_eq!(run(&["retract", "run", Path::new("/nonexistent/x.json").to_str().unwrap()]).status.code(), Some(2));
}
