use std::process::{Command, Output};

fn nsmooth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsmooth"))
        .args(args)
        .env_remove("NSMOOTH_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sw_of_e4_mod_3() {
    let o = nsmooth(&["sw", "--n", "4", "--p", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sw"], "-2");
    assert_eq!(v["sw_mod_p"], 1);
}

#[test]
fn e6_family_form_verifies() {
    let o = nsmooth(&["verify-forms", "--p", "3", "--surface", "E6", "--class", "m+=9,m-=18"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("11A + 3Gamma(16,5)"));
}

#[test]
fn failed_verification_exits_with_2() {
    // A non-strict K3 class: its recipe cannot satisfy the g-signature formula.
    let o = nsmooth(&["verify-forms", "--p", "5", "--surface", "K3", "--sample", "300"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_json_has_the_documented_shape() {
    let o = nsmooth(&["classify", "--p", "3", "--surface", "E4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["manifold"]["b_plus"], 7);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 10);
    for key in ["label", "counts", "fix_count", "b2G", "bpG", "bmG", "sign_quotient", "ns_verdict", "homologically_trivial", "recipe_status"] {
        assert!(classes[0].get(key).is_some(), "missing {key}");
    }
    assert_eq!(classes[8]["label"], "C1");
    assert_eq!(classes[8]["recipe_status"]["status"], "no_recipe");
    assert_eq!(v["summary"]["ns"], 5);
}

#[test]
fn csv_header_follows_the_table_columns() {
    let o = nsmooth(&["classify", "--p", "3", "--surface", "E4", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("label,counts,fix,b2G,bpG,bmG,sign_quotient,ns_verdict,ht,recipe\n"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn output_is_identical_across_worker_counts() {
    let a = nsmooth(&["classify", "--p", "5", "--surface", "K3", "--format", "json", "--workers", "1"]);
    let b = nsmooth(&["classify", "--p", "5", "--surface", "K3", "--format", "json", "--workers", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_with_1() {
    assert_eq!(nsmooth(&["classify", "--p", "4", "--surface", "K3"]).status.code(), Some(1));
    assert_eq!(nsmooth(&["classify", "--p", "3", "--surface", "E5"]).status.code(), Some(1));
    assert_eq!(nsmooth(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nsmooth(&["--help"]).status.code(), Some(0));
}

#[test]
fn resource_limit_exits_with_3() {
    let o = nsmooth(&["classify", "--p", "7", "--surface", "K3", "--max-candidates", "100"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn table_mismatch_reports_cells() {
    let o = nsmooth(&["tables", "z7counts", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let diffs = v["diffs"].as_array().unwrap();
    assert_eq!(diffs.len(), 3);
    assert_eq!(diffs[0]["column"], "total");
    assert_eq!(diffs[0]["expected"], "124256");
}

#[test]
fn config_file_and_output_directory() {
    let dir = std::env::temp_dir().join(format!("nsmooth-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("nsmooth.toml");
    std::fs::write(&config, "format = \"markdown\"\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nsmooth"))
        .args(["--config", config.to_str().unwrap(), "tables", "table1"])
        .env("NSMOOTH_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.join("table1.md")).unwrap();
    assert!(written.starts_with("## table1"));
    std::fs::write(&config, "colour = 1\n").unwrap();
    let bad = nsmooth(&["--config", config.to_str().unwrap(), "sw", "--n", "2", "--p", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}
