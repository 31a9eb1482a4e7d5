use std::path::Path;
use std::process::{Command, Output};

fn rydswap(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rydswap"));
    cmd.args(args).env_remove("RYDSWAP_OUT");
    if let Some(d) = env_out {
        cmd.env("RYDSWAP_OUT", d);
    }
    cmd.output().unwrap()
}

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn range_scenario_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = rydswap(&["--out", dir.path().to_str().unwrap(), "range", "--scenario", &scenario("r095-NaCs")], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("r095-NaCs.csv")).unwrap();
    assert!(csv.starts_with("label,ratio_ref,"));
    assert!(csv.lines().nth(1).unwrap().starts_with("Na70S,"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r095-NaCs.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["kind"], "range");
    assert_eq!(manifest["outputs"][0]["path"], "r095-NaCs.csv");
    assert_eq!(manifest["outputs"][0]["bytes"], csv.len());
}

#[test]
fn env_var_sets_output_and_flag_wins() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let args = ["fidelity", "--a2", "0.5", "--n", "20", "--epsilon", "0.05"];
    assert!(rydswap(&args, Some(env_dir.path())).status.success());
    assert!(env_dir.path().join("fidelity.csv").exists());

    let mut with_flag = vec!["--out", flag_dir.path().to_str().unwrap()];
    with_flag.extend(["fidelity", "--a2", "0.5", "--n", "20", "--epsilon", "0.05", "--output", "f.csv"]);
    assert!(rydswap(&with_flag, Some(env_dir.path())).status.success());
    let csv = std::fs::read_to_string(flag_dir.path().join("f.csv")).unwrap();
    assert!(csv.contains("9.52418709"), "{csv}");
    assert!(!env_dir.path().join("f.csv").exists());
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "kind = \"range\"\n[parameters]\n[[parameters.rows]]\nlabel = \"x\"\ng = \"2pi*1 kHz\"\npower = 8\n").unwrap();
    let o = rydswap(&["--out", dir.path().to_str().unwrap(), "range", "--scenario", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[schema]:") && stderr(&o).contains("gamma_r"), "{}", stderr(&o));

    let o = rydswap(&["--out", dir.path().to_str().unwrap(), "range", "--scenario", &scenario("figS1")], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not match subcommand"));
}

#[test]
fn domain_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = rydswap(&["--out", dir.path().to_str().unwrap(), "fidelity", "--a2", "1.5", "--n", "1", "--epsilon", "0.1"], None);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[physics-domain]:"));
}

#[test]
fn several_scenarios_run_in_one_call() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (scenario("hyperfine-NaCs"), scenario("hyperfine-LiCs"));
    let o = rydswap(&["--out", dir.path().to_str().unwrap(), "--jobs", "2", "hyperfine", "--scenario", &a, &b], None);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["hyperfine-NaCs.csv", "hyperfine-LiCs_dressing.csv", "hyperfine-LiCs_purity.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
