use std::process::{Command, Output};

use serde_json::Value;

fn hermlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermlab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = hermlab(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (v, out.status.code().unwrap())
}

#[test]
fn quadratic_isotropy_with_path() {
    let (v, code) = json(&["isotropy", "quad", "--field", "CDV(F5)", "--form", "1,u,pi,u*pi"]);
    assert_eq!(code, 0);
    assert_eq!(v["isotropic"], false);
    assert_eq!(v["form"], "<1,u,pi,u*pi>");
    assert!(!v["path"].as_array().unwrap().is_empty());
}

#[test]
fn descriptors_round_trip() {
    let (v, _) = json(&["isotropy", "herm", "--field", "CDV(CDV(F5))", "--class", "(u,t)", "--form", "1,pi"]);
    assert_eq!(v["field"], "CDV(CDV(F5))");
    assert_eq!(v["class"], "(u,t)");
    let (again, _) = json(&[
        "isotropy",
        "herm",
        "--field",
        v["field"].as_str().unwrap(),
        "--class",
        v["class"].as_str().unwrap(),
        "--form",
        "1,pi",
    ]);
    assert_eq!(v, again);
}

#[test]
fn uinv_exact_includes_derivation() {
    let (v, code) = json(&["uinv", "exact", "--field", "CDV(CDV(F5))", "--class", "(u,t)", "--type", "plus"]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], 6);
    assert_eq!(v["derivation"]["children"].as_array().unwrap().len(), 2);
}

#[test]
fn table_mode_prints_rule_chain() {
    let out = hermlab(&["uinv", "exact", "--field", "CDV(CDV(F5))", "--class", "(u,t)", "--type", "minus"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with("2+0=2"), "{text}");
}

#[test]
fn gff_needs_assertion() {
    let args = ["uinv", "exact", "--field", "CDV(GFF(9))", "--class", "(a,b);(v,pi)", "--type", "plus"];
    assert_eq!(hermlab(&args).status.code(), Some(3));
    let mut asserted = args.to_vec();
    asserted.extend(["--assert-division", "residue"]);
    let (v, code) = json(&asserted);
    assert_eq!(code, 0);
    assert_eq!(v["value"], 5);
    assert_eq!(v["assertions"][0], "residue");
}

#[test]
fn bounds_commands() {
    let (v, _) = json(&["bounds", "ai", "--i", "3", "--d", "2"]);
    assert_eq!((v["plus"].as_str(), v["minus"].as_str()), (Some("6"), Some("2")));
    let (v, _) = json(&["bounds", "tensor", "--n", "2", "--uk", "8"]);
    assert_eq!(v["minus"], "13/2");
    assert_eq!(v["floor"]["minus"], "6");
}

#[test]
fn lab_pid_reports_checks() {
    let (v, code) = json(&["lab", "pid", "--p", "5", "--symbol", "(2,5)", "--sigma", "gamma", "--t", "j"]);
    assert_eq!(code, 0);
    assert_eq!(v["case"], 2);
    assert_eq!(v["pi_d"], "2ij");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn lab_larmour_accepts_negative_eps_and_symmetrizes() {
    let (v, code) = json(&[
        "lab", "larmour", "--sigma", "gamma", "--eps", "-1", "--form", "1+i,j", "--symmetrize",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["eps"], -1);
}

#[test]
fn verify_subset() {
    let (v, code) = json(&["verify", "paper", "--only", "bounds"]);
    assert_eq!(code, 0);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["group"] == "bounds"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(hermlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hermlab(&["isotropy", "quad", "--field", "CDV(F4)", "--form", "1"]).status.code(), Some(1));
    assert_eq!(hermlab(&["bounds", "tensor", "--n", "2", "--uk", "x"]).status.code(), Some(1));
    assert_eq!(hermlab(&["--help"]).status.code(), Some(0));
    let (v, code) = json(&["isotropy", "quad", "--field", "CDV(F5)", "--form", "1,zz"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "parse");
}
