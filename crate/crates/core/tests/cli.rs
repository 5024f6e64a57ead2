use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_causal-axioms");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const BITS3: &str = r#"[{"card":2,"name":"1"},{"card":2,"name":"2"},{"card":2,"name":"3"}]"#;

fn table3(probs: &[&str]) -> String {
    let quoted: Vec<String> = probs.iter().map(|p| format!("\"{p}\"")).collect();
    format!(r#"{{"probs":[{}],"vars":{BITS3}}}"#, quoted.join(","))
}

fn family3(tables: [&str; 3]) -> String {
    format!(
        r#"{{"interventions":{{"1":{},"2":{},"3":{}}}}}"#,
        tables[0], tables[1], tables[2]
    )
}

const UNIFORM: [&str; 8] = ["1/8"; 8];
const COUPLED: [&str; 8] = ["3/16", "3/16", "1/16", "1/16", "1/16", "1/16", "3/16", "3/16"];

const XOR_SCM: &str = r#"{
  "graph": {"nodes":["1","2","3"],"arrows":[["1","3"],["2","3"]]},
  "cards": {"1":2,"2":2,"3":2},
  "noise": {"components":[
    {"vars":["e1"],"cards":{"e1":2},"probs":["1/2","1/2"]},
    {"vars":["e2"],"cards":{"e2":2},"probs":["1/2","1/2"]},
    {"vars":["e3"],"cards":{"e3":1},"probs":["1"]}]},
  "mechanisms": {
    "1":{"order":["e1"],"table":[0,1]},
    "2":{"order":["e2"],"table":[0,1]},
    "3":{"order":["1","2","e3"],"table":[0,1,1,0]}}
}"#;

/// X1 = e1, X2 = X1 + e2, X3 = X1 + e3 with fair bits
const TWO_GRAPHS_SCM: &str = r#"{
  "graph": {"nodes":["1","2","3"],"arrows":[["1","2"],["1","3"]]},
  "cards": {"1":2,"2":3,"3":3},
  "noise": {"components":[
    {"vars":["e1"],"cards":{"e1":2},"probs":["1/2","1/2"]},
    {"vars":["e2"],"cards":{"e2":2},"probs":["1/2","1/2"]},
    {"vars":["e3"],"cards":{"e3":2},"probs":["1/2","1/2"]}]},
  "mechanisms": {
    "1":{"order":["e1"],"table":[0,1]},
    "2":{"order":["1","e2"],"table":[0,1,1,2]},
    "3":{"order":["1","e3"],"table":[0,1,1,2]}}
}"#;

#[test]
fn derive_simple_family_gives_one_arc() {
    let dir = TempDir::new().unwrap();
    let u = table3(&UNIFORM);
    let f = write(&dir, "f.json", &family3([&u, &u, &table3(&COUPLED)]));
    let o = run(&["derive", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["g"]["arrows"], serde_json::json!([]));
    assert_eq!(r["g"]["arcs"], serde_json::json!([["1", "2"]]));
    assert_eq!(r["mode"], "iterative");
}

#[test]
fn derive_oracle_chain_as_dot() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "chain.json",
        r#"{"oracle":{"ground_truth":{"nodes":["a","b","c"],"arrows":[["a","b"],["b","c"]]}}}"#,
    );
    let o = run(&["derive", s(&f), "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let first = out.split("}\n").next().unwrap();
    assert_eq!(
        first,
        "digraph \"G\" {\n  \"a\";\n  \"b\";\n  \"c\";\n  \"a\" -> \"b\";\n  \"b\" -> \"c\";\n"
    );
    assert_eq!(out.matches("digraph").count(), 4);
    assert!(out.contains("digraph \"G_b\""));
}

#[test]
fn derive_rejects_malformed_json() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", "{\"interventions\": {\n  \"1\": [");
    let o = run(&["derive", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn derive_output_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let u = table3(&UNIFORM);
    let f = write(&dir, "f.json", &family3([&u, &u, &table3(&COUPLED)]));
    let out = dir.path().join("out.json");
    assert_eq!(
        run(&["derive", s(&f), "--pip-adjust", "--output", s(&out)])
            .status
            .code(),
        Some(0)
    );
    let first = std::fs::read(&out).unwrap();
    let again = run(&["derive", s(&f), "--pip-adjust"]);
    assert_eq!(first, again.stdout);
}

#[test]
fn check_joint_interventions_a2_holds_a3_fails() {
    let dir = TempDir::new().unwrap();
    let u = table3(&UNIFORM);
    let coupled = table3(&["3/16", "1/16", "1/16", "3/16", "3/16", "1/16", "1/16", "3/16"]);
    let f = write(&dir, "f.json", &family3([&coupled, &u, &u]));
    let p = write(&dir, "p.json", &u);
    let o = run(&["check", s(&f), "--p", s(&p), "--axioms", "A2,A3"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["reports"][0]["axiom"], "A2");
    assert_eq!(r["reports"][0]["holds"], true);
    assert_eq!(r["reports"][1]["axiom"], "A3");
    assert_eq!(r["reports"][1]["holds"], false);
}

#[test]
fn check_xor_fair_family_is_quantifiable() {
    let dir = TempDir::new().unwrap();
    let scm = write(&dir, "xor.json", XOR_SCM);
    let fam = run(&["scm", s(&scm), "--family"]);
    assert_eq!(fam.status.code(), Some(0));
    let f = write(&dir, "f.json", &stdout(&fam));
    let joint = run(&["scm", s(&scm), "--joint"]);
    let p = write(&dir, "p.json", &stdout(&joint));
    let o = run(&["check", s(&f), "--p", s(&p), "--axioms", "A4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(json(&o)["reports"][0]["holds"], true);
}

#[test]
fn check_without_p_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let u = table3(&UNIFORM);
    let f = write(&dir, "f.json", &family3([&u, &u, &u]));
    let o = run(&["check", s(&f), "--axioms", "A2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn separate_collider_prints_the_path() {
    let dir = TempDir::new().unwrap();
    let g = write(
        &dir,
        "g.json",
        r#"{"nodes":["1","2","3"],"arrows":[["1","3"],["2","3"]]}"#,
    );
    let o = run(&[
        "separate",
        s(&g),
        "--criterion",
        "d",
        "--a",
        "1",
        "--b",
        "2",
        "--c",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["verdict"], "connected");
    assert_eq!(r["path"], "1 -> 3 <- 2");
    let o = run(&["separate", s(&g), "--criterion", "d", "--a", "1", "--b", "2"]);
    assert_eq!(json(&o)["verdict"], "separated");
}

#[test]
fn separate_edgeless_is_separated_as_text() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"nodes":["1","2","3"]}"#);
    let o = run(&["separate", s(&g), "--a", "1", "--b", "2", "--format", "text"]);
    assert_eq!(stdout(&o), "separated\n");
}

#[test]
fn separate_d_on_cyclic_graph_is_an_error() {
    let dir = TempDir::new().unwrap();
    let g = write(
        &dir,
        "g.json",
        r#"{"nodes":["1","2"],"arrows":[["1","2"],["2","1"]]}"#,
    );
    let o = run(&["separate", s(&g), "--criterion", "d", "--a", "1", "--b", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn acyclify_replaces_a_cycle() {
    let dir = TempDir::new().unwrap();
    let g = write(
        &dir,
        "g.json",
        r#"{"nodes":["1","2","3"],"arrows":[["1","2"],["2","1"],["2","3"]]}"#,
    );
    let o = run(&["acyclify", s(&g), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("1 <-> 2"), "{out}");
    assert!(out.contains("2 -> 3"), "{out}");
    assert!(!out.contains("1 -> 3") && !out.contains("1 -> 2"), "{out}");
}

#[test]
fn scm_joint_of_two_graphs_example() {
    let dir = TempDir::new().unwrap();
    let scm = write(&dir, "scm.json", TWO_GRAPHS_SCM);
    let o = run(&["scm", s(&scm), "--joint"]);
    assert_eq!(o.status.code(), Some(0));
    let t: causal_axioms::JointTable = causal_axioms::JointTable::from_json(&stdout(&o)).unwrap();
    let m = t.marginal_by_names(&["2"]).unwrap();
    // X2 = 1 exactly when one of the two fair bits is set
    assert_eq!(causal_axioms::rational::format(&m.prob_of(&[1])), "1/2");
}

#[test]
fn scm_family_has_three_tables() {
    let dir = TempDir::new().unwrap();
    let scm = write(&dir, "scm.json", TWO_GRAPHS_SCM);
    let o = run(&["scm", s(&scm), "--family"]);
    let r = json(&o);
    let map = r["interventions"].as_object().unwrap();
    assert_eq!(map.keys().collect::<Vec<_>>(), ["1", "2", "3"]);
}

#[test]
fn scm_override_and_intervene() {
    let dir = TempDir::new().unwrap();
    let scm = write(&dir, "xor.json", XOR_SCM);
    let d = write(
        &dir,
        "d.json",
        r#"{"probs":["3/4","1/4"],"vars":[{"card":2,"name":"1"}]}"#,
    );
    let o = run(&["scm", s(&scm), "--intervene", "1", "--dist", s(&d)]);
    assert_eq!(o.status.code(), Some(0));
    let t = causal_axioms::JointTable::from_json(&stdout(&o)).unwrap();
    let m = t.marginal_by_names(&["1"]).unwrap();
    assert_eq!(causal_axioms::rational::format(&m.prob_of(&[1])), "1/4");

    let arg = format!("1={}", s(&d));
    let o = run(&["scm", s(&scm), "--family", "--override", &arg]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["interventions"]["1"]["probs"][0], "3/8");
}

#[test]
fn scm_cyclic_is_rejected_with_report() {
    let dir = TempDir::new().unwrap();
    let scm = write(
        &dir,
        "cyc.json",
        r#"{
      "graph": {"nodes":["1","2"],"arrows":[["1","2"],["2","1"]]},
      "cards": {"1":2,"2":2},
      "noise": {"components":[
        {"vars":["e1"],"cards":{"e1":2},"probs":["1/2","1/2"]},
        {"vars":["e2"],"cards":{"e2":2},"probs":["1/2","1/2"]}]},
      "mechanisms": {
        "1":{"order":["2","e1"],"table":[0,1,1,0]},
        "2":{"order":["1","e2"],"table":[0,1,1,0]}}
    }"#,
    );
    let o = run(&["scm", s(&scm), "--joint"]);
    assert_eq!(o.status.code(), Some(2));
    let r = json(&o);
    assert_eq!(r["valid"], false);
    assert!(r["violations"][0].as_str().unwrap().contains("cycle"));
}

#[test]
fn verify_sep_equiv_passes() {
    let o = run(&["verify", "--suite", "sep_equiv", "--seed", "7", "--budget", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["failures"], serde_json::json!([]));
    assert_eq!(r["cases_run"], 200);
}

#[test]
fn verify_uniqueness_passes() {
    let o = run(&["verify", "--suite", "uniqueness", "--seed", "7", "--budget", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_unknown_suite_is_a_usage_error() {
    let o = run(&["verify", "--suite", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}
