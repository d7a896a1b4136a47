use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permlimit")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

const DIAG: &str = r#"{"kind":"grid","matrix":[[0.8,0.2],[0.2,0.8]]}"#;

#[test]
fn density_of_pattern_in_permutation() {
    let v = json(&["density", "--pattern", "2 1", "--perm", "5 6 2 4 7 1 3"]);
    assert_eq!(v["density"], "13/21");
    assert!((v["density_float"].as_f64().unwrap() - 13.0 / 21.0).abs() < 1e-15);
}

#[test]
fn distance_between_two_permutations() {
    let v = json(&["dist", "--a", "1 2", "--b", "2 1"]);
    assert_eq!(v["value"], "1/2");
    assert_eq!(v["value_float"], 0.5);
    let v = json(&["dist", "--a", "2 1", "--b", "uniform"]);
    assert_eq!(v["value"], "1/4");
    let v = json(&["dist", "--a", "2 1", "--b", "1 2", "--metric", "infty"]);
    assert_eq!(v["value"], "1/2");
}

#[test]
fn count_and_distribution() {
    let v = json(&["count", "--pattern", "3 1 4 2", "--perm", "5 6 2 4 7 1 3"]);
    assert_eq!(v["occurrences"], 2);
    assert_eq!(v["density"], "2/35");
    let csv = stdout(&["count", "--perm", "5 6 2 4 7 1 3", "--k", "3", "--format", "csv"]);
    assert!(csv.starts_with("pattern,numerator,denominator,density_float\n"));
    assert!(csv.contains("\n2-3-1,12,35,"));
}

#[test]
fn exact_and_monte_carlo_permuton_density() {
    let v = json(&["density", "--pattern", "2 1", "--permuton", DIAG]);
    assert_eq!(v["method"], "exact");
    assert_eq!(v["exact"], "7/20");
    let v = json(&["density", "--pattern", "2 1", "--permuton", DIAG, "--mc", "--trials", "20000", "--seed", "3"]);
    assert_eq!(v["method"], "monte_carlo");
    assert_eq!(v["seed"], 3);
    let est = v["estimate"].as_f64().unwrap();
    assert!((est - 0.35).abs() < 4.0 * v["stderr"].as_f64().unwrap());
}

#[test]
fn randomized_outputs_record_the_seed() {
    let csv = stdout(&["sample", "--permuton", "uniform", "--n", "4", "--format", "csv", "--seed", "9"]);
    assert!(csv.starts_with("# seed=9\nx,y\n"));
    assert_eq!(csv.lines().count(), 6);
    let v = json(&["sample", "--permuton", "uniform", "--n", "4", "--seed", "9"]);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["permutation"].as_array().unwrap().len(), 4);
}

#[test]
fn estimate_writes_a_permuton_spec() {
    let v = json(&["estimate", "--perm", "1 2 3 4", "--resolution", "2"]);
    assert_eq!(v, serde_json::json!({"kind": "grid", "matrix": [["1", "0"], ["0", "1"]]}));
}

#[test]
fn converge_reports_trajectories() {
    let csv =
        stdout(&["converge", "--seq", "constant:2 1", "--patterns", "2 1", "--indices", "1,2,3", "--format", "csv"]);
    assert_eq!(csv, "index,length,pattern,value,value_float\n1,2,2-1,1,1\n2,2,2-1,1,1\n3,2,2-1,1,1\n");
    let v = json(&["converge", "--seq", "alternating", "--patterns", "1 2", "--indices", "5,6", "--epsilon", "0.05"]);
    assert_eq!(v["cauchy"]["below_epsilon"][0], false);
}

#[test]
fn sequence_files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.txt");
    std::fs::write(&path, "1\n2 1\n2 1\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["converge", "--seq", p, "--patterns", "2 1", "--indices", "1,3"]);
    assert_eq!(v["trajectory"][1]["value"], "1");
}

#[test]
fn invalid_permutation_file_exits_one_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "# comment\n\n3 1 x\n").unwrap();
    let out = run(&["disc", "--perm", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn exit_codes() {
    let out = run(&["density", "--pattern", "1 2 3 4 5", "--permuton", "uniform", "--exact"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["dist", "--a", "1 2", "--b", "1 1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["estimate", "--perm", "2 1", "--resolution", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["disc", "--perm", "2 1", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["value"], "1/2");
}

#[test]
fn thread_count_does_not_change_results() {
    let base = ["experiment", "--permuton", "uniform", "--k", "500", "--trials", "6", "--resolution", "32"];
    let one = stdout(&[&base[..], &["--threads", "1"]].concat());
    let four = stdout(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
}
