use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/catalog");
    root.join(format!("{name}.g")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphpoly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn psi_of_wheel_has_sixteen_cubic_terms() {
    let o = run(&["psi", &fixture("w3")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let terms: Vec<&str> = text.trim().split(" + ").collect();
    assert_eq!(terms.len(), 16);
    assert!(terms.iter().all(|t| t.split('*').count() == 3));
}

#[test]
fn phi_partition_on_wheel() {
    let o = run(&["phi", &fixture("w3"), "--partition", "{1}{2,4}"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let terms: Vec<&str> = text.trim().split(" + ").collect();
    assert_eq!(terms.len(), 4);
    assert!(terms.iter().all(|t| t.split('*').count() == 4));
}

#[test]
fn reduce_k34_ends_in_weight_drop() {
    let o = run(&["reduce", &fixture("k34"), "--auto"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().lines().last().unwrap().starts_with("WEIGHT DROP"));
}

#[test]
fn five_inv_and_dodgson() {
    let o = run(&["five-inv", &fixture("w3"), "--edges", "1,2,3,4,5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a6");
    let o = run(&["dodgson", &fixture("w3"), "--I", "1", "--J", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).trim().is_empty());
}

#[test]
fn rho_from_terminals_line_and_flag() {
    let a = run(&["rho", &fixture("6_2")]);
    let b = run(&["rho", &fixture("6_2"), "--terminals", "1,2,3"]);
    assert_eq!(stdout(&a).trim(), "x*y + x*z + y*z");
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn predict_batch_keeps_input_order() {
    let files = [fixture("k34"), fixture("w3"), fixture("2join-w3-w3")];
    let mut args = vec!["predict", "--witness", "--jobs", "3"];
    args.extend(files.iter().map(String::as_str));
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let headers: Vec<&str> = text.lines().filter(|l| l.starts_with("# ")).collect();
    assert_eq!(headers.len(), 3);
    assert!(headers[0].ends_with("k34.g") && headers[2].ends_with("2join-w3-w3.g"));
    assert!(text.contains("no-drop-known"));
}

#[test]
fn structured_output_is_deterministic() {
    let args = ["reduce", &fixture("w3"), "--format", "json", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["command"], "reduce");
    assert!(v["result"][0]["graph_hash"].is_string());
}

#[test]
fn verify_identities_random_sweep() {
    let o = run(&["verify-identities", "--random", "2", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().count() >= 10);
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["psi", "/nonexistent/graph.g"]).status.code(), Some(2));
    assert_eq!(run(&["five-inv", &fixture("w3"), "--edges", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["phi", &fixture("w3"), "--partition", "{1}{1}"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failed_verdict_exits_with_one() {
    let o = run(&["rho", &fixture("10_b"), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not denominator reducible"));
}
