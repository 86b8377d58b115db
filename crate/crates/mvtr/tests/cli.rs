use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn mvtr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvtr")).env_remove("MVTR_SEEDS").args(args).output().unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn seed_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn theorem_report_shape() {
    let o = mvtr(&["verify", "theorem11", "--g", "1", "--l", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert_eq!(r["identity"], "theorem11(1,2)");
    assert_eq!(r["pass"], true);
    assert_eq!(r["parameters"]["l"], 2);
    assert_eq!(r["residual_terms"].as_array().unwrap().len(), 0);
    assert!(r["wall_time"].is_number());
    let keys: Vec<&str> = r["seed_provenance"].as_array().unwrap().iter().map(|p| p["key"].as_str().unwrap()).collect();
    assert_eq!(keys, ["b_g:1", "c_g:1"]);
}

#[test]
fn ranges_fan_out_in_order() {
    let o = mvtr(&["--jobs", "2", "verify", "theorem11", "--g", "1", "--l", "1-3"]);
    assert_eq!(o.status.code(), Some(0));
    let ids: Vec<String> = json_lines(&o).iter().map(|r| r["identity"].as_str().unwrap().to_string()).collect();
    assert_eq!(ids, ["theorem11(1,1)", "theorem11(1,2)", "theorem11(1,3)"]);
}

#[test]
fn reports_are_deterministic_without_timing() {
    let a = mvtr(&["--no-timing", "verify", "corollary", "--which", "14", "--g", "1-2", "--l", "1-2"]);
    let b = mvtr(&["--no-timing", "verify", "corollary", "--which", "14", "--g", "1-2", "--l", "1-2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("wall_time"));
}

#[test]
fn unseeded_genus_names_the_correlator() {
    let o = mvtr(&["verify", "theorem11", "--g", "3", "--l", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let r = &json_lines(&o)[0];
    let e = r["error"].as_str().unwrap();
    assert!(e.starts_with("unseeded correlator <tau_"), "{e}");
    assert!(e.contains("lambda_2"), "{e}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("unseeded correlator"));
}

#[test]
fn psi_table_csv() {
    let o = mvtr(&["--format", "csv", "psi-table", "--max-b", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.starts_with("b,k,i,f\n"));
    assert!(s.lines().any(|l| l == "4,0,5,24"));
    // top coefficient of Ψ_6^6 is 11!!
    assert!(s.lines().any(|l| l == "6,6,13,10395"));
}

#[test]
fn partition_cutjoin() {
    let o = mvtr(&["verify", "cutjoin", "--g", "1", "--mu", "2,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["parameters"]["mu"], serde_json::json!([2, 1]));
    let o = mvtr(&["verify", "cutjoin", "--g", "0-1", "--max-size", "3"]);
    assert_eq!(json_lines(&o).len(), 2 * 6);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(mvtr(&["verify", "cutjoin", "--g", "1"]).status.code(), Some(2));
}

#[test]
fn lemmas_and_recursion() {
    let o = mvtr(&["verify", "lemmas", "--order", "6", "--max-a", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = mvtr(&["bm", "verify", "--g", "0", "--l", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["pass"], true);
}

#[test]
fn wform_recursion_matches_hodge_table() {
    let a = mvtr(&["bm", "wform", "--g", "1", "--l", "2"]);
    let b = mvtr(&["bm", "wform", "--g", "1", "--l", "2", "--hodge"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let w = &json_lines(&a)[0];
    assert_eq!(w["coeffs"].as_array().unwrap().len(), 5);
    // −(τ²+τ)² on dΨ̂_0(t1)dΨ̂_0(t2)dΨ̂_0(t3)
    let c = mvtr(&["--format", "csv", "bm", "wform", "--g", "0", "--l", "3"]);
    assert_eq!(String::from_utf8_lossy(&c.stdout), "b1,b2,b3,coeff\n0,0,0,\"-tau^4 - 2*tau^3 - tau^2\"\n");
}

#[test]
fn curve_and_hodge_eval() {
    let o = mvtr(&["curve", "series", "--order", "3"]);
    let v = &json_lines(&o)[0];
    assert_eq!(v["y"], serde_json::json!(["0", "1", "tau"]));
    assert_eq!(v["t"][1], "tau + 1");
    let o = mvtr(&["hodge", "eval", "--g", "2", "--b", "1,2", "--class", "lambda-g"]);
    let v = &json_lines(&o)[0];
    assert_eq!(v["value"], "7/1920");
    assert_eq!(v["class"], "lambda-g");
}

#[test]
fn default_seeds_check_clean() {
    let o = mvtr(&["seed", "check"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    let keys = r["detail"]["keys"].as_object().unwrap();
    assert_eq!(keys.len(), 10);
    assert!(keys.values().all(|s| s != "flagged"));
    assert_eq!(keys["c_g:1"], "consistent");
}

const PERTURBED: &str = r#"version = 1
[seeds]
"c_g:1" = "1/25"
"b_g:1" = "1/24"
[provenance]
"c_g:1" = "perturbed"
"b_g:1" = "sine series"
"#;

#[test]
fn perturbed_constant_is_flagged() {
    let f = seed_file(PERTURBED);
    let o = mvtr(&["seed", "check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = &json_lines(&o)[0];
    assert_eq!(r["detail"]["keys"]["c_g:1"], "flagged");
    assert_eq!(r["pass"], false);
    // the same file through the environment variable breaks the theorem
    let o = Command::new(env!("CARGO_BIN_EXE_mvtr"))
        .env("MVTR_SEEDS", f.path())
        .args(["verify", "theorem11", "--g", "1", "--l", "1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(json_lines(&o)[0]["residual_count"].as_u64().unwrap() > 0);
}

#[test]
fn empty_seed_file_is_valid() {
    let f = seed_file("");
    let o = mvtr(&["seed", "check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert!(r["detail"]["capability"].as_str().unwrap().contains("genus 0"));
}

#[test]
fn malformed_seed_files() {
    for (text, needle) in [
        ("[seeds]\n\"c_g:x\" = \"1/2\"\n", "c_g:x"),
        ("[seeds]\n\"c_g:1\" = \"1/0\"\n[provenance]\n\"c_g:1\" = \"x\"\n", "c_g:1"),
        ("[seeds]\n\"c_g:1\" = \"1/24\"\n", "no provenance"),
        ("[seeds]\n\"k_g:1\" = \"1/24\"\n", "k_g"),
        ("version = 7\n", "version"),
        ("[seeds\n", "line 1"),
    ] {
        let f = seed_file(text);
        let o = mvtr(&["seed", "check", f.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{text}: {err}");
    }
}

#[test]
fn csv_reports_are_refused() {
    let o = mvtr(&["--format", "csv", "verify", "theorem11", "--g", "1", "--l", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(mvtr(&["verify", "theorem11", "--g", "0", "--l", "2"]).status.code(), Some(2));
}
