use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_ATOMS: &str = r#"{"levels": [[{"p": 1.0, "parent": -1}], [{"p": 0.5, "parent": 0}, {"p": 0.5, "parent": 0}]]}"#;

fn mrz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrz")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn summary(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("summary is JSON")
}

fn out_dir(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn two_atom_fixture_passes() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "tree.json", TWO_ATOMS);
    let var = write(&dir, "var.json", r#"{"level": 1, "values": [2.0, 0.0]}"#);
    let out = mrz(&["verify", "--tree", &tree, "--var", &var, "--p", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = summary(&out);
    assert_eq!(report["passed"], true);
    assert!(report["instance"].is_null());
}

#[test]
fn corrupted_tree_names_the_invariant() {
    let dir = TempDir::new().unwrap();
    let tree = write(
        &dir,
        "tree.json",
        r#"{"levels": [[{"p": 1.0, "parent": -1}], [{"p": 0.5, "parent": 0}, {"p": 0.25, "parent": 0}]]}"#,
    );
    let var = write(&dir, "var.json", r#"{"level": 1, "values": [2.0, 0.0]}"#);
    let out = mrz(&["verify", "--tree", &tree, "--var", &var]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("probability-conservation"));
}

#[test]
fn empty_variable_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "tree.json", TWO_ATOMS);
    let var = write(&dir, "var.json", "");
    assert_eq!(code(&mrz(&["verify", "--tree", &tree, "--var", &var])), 1);
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let var = write(&dir, "var.json", r#"{"level": 0, "values": [1.0]}"#);
    let missing = dir.path().join("absent.json").display().to_string();
    assert_eq!(code(&mrz(&["verify", "--tree", &missing, "--var", &var])), 3);
}

#[test]
fn failing_check_serializes_the_instance() {
    let dir = TempDir::new().unwrap();
    let tree = write(
        &dir,
        "tree.json",
        r#"{"levels": [[{"p": 1.0, "parent": -1}],
            [{"p": 0.5, "parent": 0}, {"p": 0.5, "parent": 0}],
            [{"p": 0.25, "parent": 0}, {"p": 0.25, "parent": 0}, {"p": 0.5, "parent": 1}]]}"#,
    );
    let var = write(&dir, "var.json", r#"{"level": 2, "values": [4.0, 0.0, 1.0]}"#);
    let out_path = out_dir(&dir, "out");
    let out = mrz(&["verify", "--tree", &tree, "--var", &var, "--c", "1e-9", "--out", &out_path]);
    assert_eq!(code(&out), 2);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(Path::new(&out_path).join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["instance"]["variable"]["values"][0], 4.0);
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["B-bound"]);
}

#[test]
fn invalid_exponents_cite_the_constraint() {
    let out = mrz(&["norms", "--mode", "hls", "--p", "3", "--q", "2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 < p < q < ∞"));
    assert_eq!(code(&mrz(&["norms", "--mode", "bmo", "--r", "2", "--alpha", "0.3"])), 1);
    assert_eq!(code(&mrz(&["fuzz", "--kind", "sideways"])), 1);
}

#[test]
fn conditions_fuzz_has_no_violations() {
    let out = mrz(&["fuzz", "--kind", "conditions", "--trials", "10000", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let s = summary(&out);
    assert_eq!(s["violation_count"], 0);
    assert_eq!(s["status"], "pass");
}

#[test]
fn zero_trials_give_an_empty_table() {
    let dir = TempDir::new().unwrap();
    let out_path = out_dir(&dir, "out");
    let out = mrz(&["fuzz", "--kind", "numineq", "--trials", "0", "--out", &out_path]);
    assert_eq!(code(&out), 0);
    assert_eq!(summary(&out)["status"], "no data");
    let csv = fs::read_to_string(Path::new(&out_path).join("fuzz.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn same_seed_same_bytes_at_any_thread_count() {
    let dir = TempDir::new().unwrap();
    let mut tables = Vec::new();
    for (i, threads) in ["1", "1", "4"].iter().enumerate() {
        let out_path = out_dir(&dir, &format!("run{i}"));
        let out = Command::new(env!("CARGO_BIN_EXE_mrz"))
            .args(["fuzz", "--kind", "numineq", "--trials", "2000", "--seed", "9", "--out", &out_path])
            .env("MRZ_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        tables.push(fs::read(Path::new(&out_path).join("fuzz.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    assert_eq!(tables[0], tables[2]);
}

#[test]
fn rerun_reproduces_outputs() {
    let dir = TempDir::new().unwrap();
    let first = out_dir(&dir, "first");
    let second = out_dir(&dir, "second");
    let out = mrz(&["norms", "--mode", "conjugate", "--p", "2", "--trials", "500", "--seed", "4", "--out", &first]);
    assert_eq!(code(&out), 0);
    let manifest = Path::new(&first).join("manifest.json").display().to_string();
    let again = mrz(&["rerun", &manifest, "--out", &second]);
    assert_eq!(code(&again), 0);
    for name in ["norms.csv", "summary.json"] {
        assert_eq!(
            fs::read(Path::new(&first).join(name)).unwrap(),
            fs::read(Path::new(&second).join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn counterexample_curve_has_half_slope() {
    let dir = TempDir::new().unwrap();
    let out_path = out_dir(&dir, "out");
    let out = mrz(&["counterexample", "--p", "2", "--n-max", "60", "--out", &out_path]);
    assert_eq!(code(&out), 0);
    let slope = summary(&out)["slope"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&slope), "slope {slope}");
    let csv = fs::read_to_string(Path::new(&out_path).join("counterexample.csv")).unwrap();
    assert!(csv.starts_with("N,norm_p_to_the_p,closed_form_value,K_threshold\n"));
    assert_eq!(csv.lines().count(), 62);
}

#[test]
fn counterexample_reads_a_chain_file() {
    let dir = TempDir::new().unwrap();
    let chain = write(&dir, "chain.json", r#"{"d": [1.0, 0.5, 0.5, 0.125]}"#);
    let out = mrz(&["counterexample", "--p", "3", "--n-max", "3", "--chain", &chain]);
    assert_eq!(code(&out), 0);
    let bad = write(&dir, "bad.json", r#"{"d": [1.0, 0.7]}"#);
    assert_eq!(code(&mrz(&["counterexample", "--chain", &bad])), 1);
}

#[test]
fn bmo_estimate_is_stable_across_seeds() {
    let estimate = |seed: &str| {
        let out = mrz(&["norms", "--mode", "bmo", "--r", "2", "--depth", "6", "--trials", "10000", "--seed", seed]);
        assert_eq!(code(&out), 0);
        summary(&out)["estimate"].as_f64().unwrap()
    };
    let (a, b) = (estimate("1"), estimate("2"));
    assert!(a.is_finite() && b.is_finite() && a > 0.0);
    assert!((a - b).abs() <= 0.1 * a.max(b), "{a} vs {b}");
}
