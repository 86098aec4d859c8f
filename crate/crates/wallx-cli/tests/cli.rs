use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wallx")).args(args).arg("--json").output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let doc = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), doc, String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn a2_classify_worked_points() {
    for (args, expected) in [
        (["--theta", "3/4,1/4,1/2"], vec!["III"]),
        (["--alphas", "0.3,0.3"], vec!["ALL"]),
        (["--alphas", "-0.3,-0.2"], vec!["III"]),
        (["--alphas", "1.2,0.4"], vec!["I"]),
    ] {
        let mut a = vec!["a2-classify"];
        a.extend(args);
        let (code, doc, _) = run(&a);
        assert_eq!(code, 0);
        let types: Vec<&str> = doc["result"]["types"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
        assert_eq!(types, expected, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["a2-classify", "--theta", "1/2,x,0"]).0, 2);
    assert_eq!(run(&["a2-classify", "--alphas", "1,0.4"]).0, 3);
    assert_eq!(run(&["factorize", "--input", &data("zero_charge.json")]).0, 1);
    assert_eq!(run(&["factorize", "--input", "/nonexistent.json"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
}

#[test]
fn factorize_single_ray() {
    let (code, doc, _) = run(&["factorize", "--input", &data("single_ray.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["spectrum"]["rays"].as_array().unwrap().len(), 1);
    assert_eq!(doc["result"]["factor_check"]["pass"], true);
}

#[test]
fn wallcross_matrix_middle_factor() {
    let (code, doc, _) = run(&["wallcross", "--input", &data("a2_matrix.json")]);
    assert_eq!(code, 0);
    let m = doc["result"]["matrices"].as_array().unwrap();
    assert_eq!(m.len(), 3);
    assert!(m[1]["matrix"].as_str().unwrap().contains("xy"));
    assert_eq!(doc["result"]["involution"], true);
}

#[test]
fn identical_charge_keeps_a() {
    let text = std::fs::read_to_string(data("single_ray.json")).unwrap();
    let mut j: Value = serde_json::from_str(&text).unwrap();
    j["new_charge"] = j["charge"].clone();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("same.json");
    std::fs::write(&p, j.to_string()).unwrap();
    let (code, doc, _) = run(&["wallcross", "--input", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, fac, _) = run(&["factorize", "--input", p.to_str().unwrap()]);
    let a_new = &doc["result"]["a_new"]["a"];
    let before: Vec<&Value> =
        fac["result"]["spectrum"]["rays"].as_array().unwrap().iter().flat_map(|r| r["terms"].as_array().unwrap()).collect();
    assert_eq!(a_new.as_array().unwrap().iter().collect::<Vec<_>>(), before);
}

#[test]
fn manifest_is_reproducible() {
    let args = ["wcf-verify", "--q", "2,3", "--cutoff", "2,2", "--thetas=-0.35,0.05,0.45"];
    let (c1, d1, _) = run(&args);
    let (c2, d2, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(d1["manifest"]["output_sha256"], d2["manifest"]["output_sha256"]);
    assert_eq!(d1["manifest"]["input_sha256"], d2["manifest"]["input_sha256"]);
    assert_eq!(d1["manifest"]["mode"], "exact");
}

#[test]
fn config_file_and_float_mode() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wallx.toml");
    let out = dir.path().join("out.json");
    std::fs::write(&cfg, format!("q = [3]\nmode = \"float\"\noutput = {:?}\n", out.to_str().unwrap())).unwrap();
    let (code, doc, _) = run(&["wcf-verify", "--config", cfg.to_str().unwrap(), "--thetas=-0.35,0.05,0.45"]);
    assert_eq!(code, 0);
    assert_eq!(doc["manifest"]["mode"], "float");
    assert_eq!(doc["manifest"]["arguments"]["q"], serde_json::json!([3]));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(written, doc);
    std::fs::write(&cfg, "nonsense = true\n").unwrap();
    assert_eq!(run(&["regions", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn small_region_grid_and_oracle_sweep() {
    let (code, doc, _) = run(&["regions", "--grid", "12"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["points"].as_array().unwrap().len(), 144);
    assert_eq!(doc["result"]["summary"]["disagreements"], 0);
    let (code, doc, _) = run(&["hall-oracle", "--q", "3", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["mismatches"].as_array().unwrap().len(), 0);
}
