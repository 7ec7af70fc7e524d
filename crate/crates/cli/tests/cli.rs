use std::process::{Command, Output};

use serde_json::Value;

const F: &str = "O1+U2+O3-U4-O2+U1+O4-U3-";
const T: &str = "O1+U2+O3+U1+O2+U3+";
/// A diagram with a planted Ω3 triangle.
const TRI: &str = "O1+O2+U1+O3+U2+U3+";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussmoves")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&stdout(&a)).expect("valid json")
}

fn schema_for(def: &str) -> jsonschema::JSONSchema {
    let mut schema: Value = serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap();
    let obj = schema.as_object_mut().unwrap();
    obj.remove("anyOf");
    obj.insert("$ref".into(), Value::String(format!("#/$defs/{def}")));
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

fn assert_valid(def: &str, v: &Value) {
    let s = schema_for(def);
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("{def}: {msgs:?}\n{v:#}");
}

#[test]
fn invariants_of_figure_eight() {
    let out = stdout(&["invariants", F]);
    assert_eq!(out, "writhe 0\nA4 1\nD4 0\nW3 0\nW5 0\n");
    let v = json(&["invariants", F]);
    assert_valid("invariants", &v);
    assert_eq!(v["A"]["4"], 1);
    assert_eq!(v["winding"], Value::Null);
}

#[test]
fn invariants_of_empty_and_trefoil() {
    assert_eq!(stdout(&["invariants", ""]), "writhe 0\nA4 0\nD4 0\nW3 0\nW5 0\n");
    let out = stdout(&["invariants", T, "--winding-seed", "-1"]);
    assert!(out.starts_with("writhe 3\nwinding -1\n"), "{out}");
    assert!(out.contains("W3 1\n"));
}

#[test]
fn parse_errors_exit_2() {
    let out = run(&["invariants", "O1+U2+"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["moves", "apply", "", "r9@0"]).status.code(), Some(2));
}

#[test]
fn inapplicable_site_exits_3() {
    assert_eq!(run(&["moves", "apply", T, "r3@1,2,3"]).status.code(), Some(3));
    assert_eq!(run(&["moves", "apply", "O1+U1+", "r2-@1,2"]).status.code(), Some(3));
}

#[test]
fn list_and_apply() {
    let out = stdout(&["moves", "list", "O1+U1+"]);
    let removals: Vec<&str> = out.lines().filter(|l| l.starts_with("r1-")).collect();
    assert_eq!(removals.len(), 2);
    assert!(removals.iter().all(|l| l.ends_with("(-)")));
    let v = json(&["moves", "list", TRI]);
    assert_valid("moves_list", &v);
    assert!(v["sites"].as_array().unwrap().iter().any(|s| s["site"].as_str().unwrap().starts_with("r3@")));

    let v = json(&["moves", "apply", "", "r1+@0:i=+1,j=+1"]);
    assert_valid("moves_apply", &v);
    assert_eq!(v["code"], "O1+U1+");
    assert_eq!(v["winding_delta"], 1);
}

#[test]
fn r3_keeps_w3_with_zero_linking() {
    let after = json(&["moves", "apply", TRI, "r3@1,2,3"]);
    let code = after["code"].as_str().unwrap();
    let before = json(&["invariants", TRI]);
    let v = json(&["invariants", code]);
    assert_eq!(v["W"]["3"], before["W"]["3"]);
}

#[test]
fn rewrite_outputs() {
    let out = stdout(&["rewrite", "", "r1+@0:i=+1,j=+1"]);
    assert_eq!(out, "Ω1++ @ r1+@0:i=+1,j=+1\nO1+U1+\n");
    let v = json(&["rewrite", "O1+U2-O2-U1+", "r1+@1:i=-1,j=+1"]);
    assert_valid("rewrite", &v);
    let classes: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["class"].as_str().unwrap()).collect();
    assert_eq!(classes, ["Ω2--", "Ω1+-"]);
    assert_eq!(v["matches_direct"], true);
    let v = json(&["rewrite", TRI, "r3@1,2,3", "--set", "alternate"]);
    assert_valid("rewrite", &v);
    assert_eq!(v["matches_direct"], true);
}

#[test]
fn verify_is_reproducible() {
    let args = ["verify", "prop4", "--trials", "30", "--max-arrows", "6", "--seed", "9"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    assert!(a.starts_with("prop4: pass"));
    let v = json(&args);
    assert_valid("verify", &v);
    assert_eq!(v["pass"], true);
    assert_eq!(run(&["verify", "prop4", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
}

#[test]
fn demo_fig8() {
    let out = stdout(&["demo", "fig8"]);
    assert!(out.contains("ΔA_4 = -1"));
    assert!(out.contains("ΔD_4 = 1"));
    assert!(out.contains("≥2 Ω3-moves"));
    let v = json(&["demo", "fig8"]);
    assert_valid("demo_fig8", &v);
    assert_eq!(v["report"]["min_omega3_moves"], 2);
}

#[test]
fn demo_thm3_failure_is_explicit() {
    let out = run(&["demo", "thm3", F, "--depth", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("within depth 2"));
}

#[test]
fn demo_thm3_on_figure_eight() {
    let v = json(&["demo", "thm3", F]);
    assert_valid("demo_thm3", &v);
    assert_eq!(v["k_profile"]["A"]["4"], 0);
    assert_eq!(v["k_profile"]["D"]["4"], -1);
    assert_eq!(v["k_profile"]["writhe"], -2);
    assert_eq!(v["k_profile"]["winding"], v["d_profile"]["winding"]);
    assert_eq!(v["report"]["two_omega1_classes"], true);
}

#[test]
fn realizable() {
    assert_eq!(stdout(&["realizable", F]), "genus 0\nrealizable\n");
    let v = json(&["realizable", "O1-U2-U1-O2-"]);
    assert_valid("realizable", &v);
    assert_eq!(v["genus"], 1);
}

#[test]
fn schema_rejects_wrong_shapes() {
    assert!(!schema_for("invariants").is_valid(&serde_json::json!({"code": "O1+U1+", "writhe": "x"})));
    assert!(!schema_for("verify").is_valid(&serde_json::json!({"suite": "prop9"})));
}
