use serde_json::Value;
use std::process::{Command, Output};

fn chevtrunc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chevtrunc")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn rootsys_a1_has_one_positive_root() {
    let out = chevtrunc(&["rootsys", "--type", "A1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["positive_roots"].as_array().unwrap().len(), 1);
    assert_eq!(v["cartan_matrix"], serde_json::json!([[2]]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(chevtrunc(&["rootsys", "--type", "A1", "--bogus"]).status.code(), Some(2));
    assert_eq!(chevtrunc(&["frobnicate"]).status.code(), Some(2));
    let out = chevtrunc(&["hwmod", "--type", "A2", "--weight", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--weight"));
    assert_eq!(chevtrunc(&["bound", "-r", "3", "--k-range", "9:2"]).status.code(), Some(2));
    assert_eq!(chevtrunc(&["cohomology", "--k", "2", "--coeff", "zz"]).status.code(), Some(2));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(chevtrunc(&["--help"]).status.code(), Some(0));
    assert_eq!(chevtrunc(&["--version"]).status.code(), Some(0));
}

#[test]
fn pbw_straightens_a_commutator() {
    let v = json(&chevtrunc(&["pbw", "--type", "A1", "--expr", "e1 f1"]));
    // e f = f e + h
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    assert!(v["terms"].as_array().unwrap().iter().all(|t| t["coeff"] == "1"));
}

#[test]
fn hwmod_adjoint_of_a2() {
    let out = chevtrunc(&["hwmod", "--type", "A2", "--weight", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dim_total"], 8);
    assert_eq!(v["serre_check"], true);
}

#[test]
fn trunc_reports_cardinality() {
    let v = json(&chevtrunc(&["trunc", "--type", "A2", "--weight", "3,3", "-p", "5", "-r", "2"]));
    assert_eq!(v["cardinality_exponent"], "4");
    assert_eq!(v["s_invariance"], true);
}

#[test]
fn constancy_verdicts() {
    let ok = chevtrunc(&[
        "constancy",
        "--type",
        "A2",
        "--weight",
        "3,3",
        "--weight2",
        "128,3",
        "--moved",
        "a1",
        "-p",
        "5",
        "-r",
        "2",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["verdict"], "isomorphism");
    let bad = chevtrunc(&[
        "constancy",
        "--type",
        "A2",
        "--weight",
        "3,3",
        "--weight2",
        "28,3",
        "--moved",
        "a1",
        "-p",
        "5",
        "-r",
        "2",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["hypotheses"]["congruent"], false);
}

#[test]
fn cohomology_and_slopes_agree() {
    let c = json(&chevtrunc(&["cohomology", "--p", "5", "--k", "4", "--m", "0", "--coeff", "qp"]));
    assert_eq!(c["g"], 3);
    assert_eq!(c["d"], 5);
    assert_eq!(c["dim_h1"], 10);
    assert_eq!(c["integrality"], true);
    let s = json(&chevtrunc(&["slopes", "--p", "5", "--k", "4", "--m", "0", "--beta", "1", "-r", "3"]));
    assert_eq!(s["charpoly"], c["hecke_charpoly"]);
    assert_eq!(s["prop65"], true);
    let total: u64 = s["newton"].as_array().unwrap().iter().map(|e| e["mult"].as_u64().unwrap()).sum();
    assert_eq!(total, 10);
}

#[test]
fn truncated_coefficients() {
    let v = json(&chevtrunc(&["cohomology", "--k", "4", "--coeff", "trunc:2"]));
    assert_eq!(v["module_exponent"], "3");
    assert_eq!(v["integrality"], true);
}

#[test]
fn generator_override_keeps_the_charpoly() {
    let group = chevtrunc::arithcoh::free_generators(5).unwrap();
    // the same generators in reverse order and with the first one inverted
    let mut gens = group.generators.clone();
    gens.reverse();
    gens[0] = chevtrunc::arithcoh::mat_inv(&gens[0]);
    let text: String = gens.iter().map(|g| format!("{} {} {} {}\n", g[0][0], g[0][1], g[1][0], g[1][1])).collect();
    let path = std::env::temp_dir().join(format!("chevtrunc-gens-{}.txt", std::process::id()));
    std::fs::write(&path, text).unwrap();
    let custom = json(&chevtrunc(&["cohomology", "--k", "3", "--generators", path.to_str().unwrap()]));
    let default = json(&chevtrunc(&["cohomology", "--k", "3"]));
    std::fs::remove_file(&path).ok();
    assert_eq!(custom["hecke_charpoly"], default["hecke_charpoly"]);
}

#[test]
fn bound_over_a_short_range() {
    let out = chevtrunc(&["bound", "--p", "5", "--beta", "1", "-r", "3", "--k-range", "2:6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["C"], "14");
    assert_eq!(v["sweep"].as_array().unwrap().len(), 5);
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let args = ["cohomology", "--k", "6", "--coeff", "zp"];
    let a = chevtrunc(&args);
    let b = chevtrunc(&args);
    assert_eq!(a.stdout, b.stdout);
    let path = std::env::temp_dir().join(format!("chevtrunc-out-{}.json", std::process::id()));
    let out = chevtrunc(&["--output", path.to_str().unwrap(), "cohomology", "--k", "6", "--coeff", "zp"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_file(&path).ok();
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_chevtrunc"))
        .args(["rootsys", "--type", "A1"])
        .env("CHEVTRUNC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_chevtrunc"))
        .args(["rootsys", "--type", "B2"])
        .env("CHEVTRUNC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
