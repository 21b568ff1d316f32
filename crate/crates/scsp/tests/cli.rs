//! End-to-end tests of the command-line interface: report formats, exit
//! codes, determinism, and witness re-verification.

mod common;

use std::io::Write;
use std::process::{Command, Output};

use scsp::parse::parse_instance;
use scsp::relation::Point;
use scsp::solver::verify_witness;

fn scsp_bin() -> &'static str {
    env!("CARGO_BIN_EXE_scsp")
}

fn run_args(args: &[&str]) -> Output {
    Command::new(scsp_bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_instance(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".scsp").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

const NORTH_CYCLE: &str = "\
vars x y z
x y : proj:N
y z : proj:N
z x : proj:N
";

const SATISFIABLE: &str = "\
# north-east chain with a unary anchor
vars p q
p q : cone:NE
p : [0, 1/4pi)
";

const TWO_BRANCH: &str = "\
vars a b c
a b : proj:E | (1/4pi, 3/4pi)
a c : (0, 1/2pi)
c b : (1/4pi, 3/4pi)
";

#[test]
fn check_reports_and_exit_codes() {
    let f = write_instance(SATISFIABLE);
    let out = run_args(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "PC-CONSISTENT-SO-FAR"
    );

    // Propagation refutes an east/east/west ray triangle.
    let f = write_instance("vars x y z\nx y : proj:E\ny z : proj:E\nx z : proj:W\n");
    let out = run_args(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("INCONSISTENT (edge "), "got: {text}");
}

#[test]
fn solve_consistent_with_witness_lines() {
    let f = write_instance(SATISFIABLE);
    let out = run_args(&["solve", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("CONSISTENT"));
    let var_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("var ")).collect();
    assert_eq!(var_lines.len(), 2);
    assert!(var_lines[0].starts_with("var p = ("));
    assert!(var_lines[1].starts_with("var q = ("));

    // The printed witness satisfies the instance per the membership oracle.
    let inst = parse_instance(SATISFIABLE).unwrap();
    let mut witness = vec![Point::new(0.0, 0.0)];
    for line in &var_lines {
        let coords = line.split_once('(').unwrap().1.trim_end_matches(')');
        let (x, y) = coords.split_once(',').unwrap();
        witness.push(Point::new(
            x.trim().parse().unwrap(),
            y.trim().parse().unwrap(),
        ));
    }
    assert!(verify_witness(&inst.network, &witness));
}

#[test]
fn solve_inconsistent_and_limit() {
    let f = write_instance(NORTH_CYCLE);
    let out = run_args(&["solve", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "INCONSISTENT");

    let f = write_instance(TWO_BRANCH);
    let out = run_args(&["solve", f.path().to_str().unwrap(), "--steps", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "LIMIT");
}

#[test]
fn solve_is_deterministic() {
    let f = write_instance(TWO_BRANCH);
    let path = f.path().to_str().unwrap();
    let a = run_args(&["solve", path, "--seed", "7", "--stats"]);
    let b = run_args(&["solve", path, "--seed", "7", "--stats"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        a.stdout, b.stdout,
        "identical inputs and seed must give identical reports"
    );

    let par = run_args(&["solve", path, "--seed", "7", "--stats", "--parallel"]);
    assert_eq!(
        a.stdout, par.stdout,
        "parallel mode must match sequential output"
    );
}

#[test]
fn solve_json_schema() {
    let f = write_instance(SATISFIABLE);
    let out = run_args(&["solve", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "consistent");
    let witness = v["witness"].as_array().unwrap();
    assert_eq!(witness.len(), 2);
    assert_eq!(witness[0]["var"], "p");
    assert!(witness[0]["x"].is_number() && witness[0]["y"].is_number());
    assert!(v["stats"]["nodes"].as_u64().unwrap() >= 1);
    assert!(v["stats"]["pc_calls"].is_number() && v["stats"]["lp_calls"].is_number());

    let f = write_instance(NORTH_CYCLE);
    let out = run_args(&["solve", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "inconsistent");
    assert!(v["witness"].is_null());
}

#[test]
fn check_json_schema() {
    let f = write_instance("vars x y z\nx y : proj:E\ny z : proj:E\nx z : proj:W\n");
    let out = run_args(&["check", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "inconsistent");
    assert!(v["edge"].is_array());
    assert!(v["stats"]["queue_pops"].is_number());
}

#[test]
fn verify_flag_reports() {
    let f = write_instance(SATISFIABLE);
    let out = run_args(&["solve", f.path().to_str().unwrap(), "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        String::from_utf8_lossy(&out.stdout).contains("verify: witness satisfies all constraints")
    );
}

#[test]
fn dump_lp_marks_strict_rows() {
    let f = write_instance(SATISFIABLE);
    let out = run_args(&["solve", f.path().to_str().unwrap(), "--dump-lp"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("# leaf 1"), "leaf header expected in: {text}");
    assert!(
        text.contains("# strict"),
        "open sector bounds translate strictly"
    );
    let again = run_args(&["solve", f.path().to_str().unwrap(), "--dump-lp"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn parse_errors_exit_65() {
    let f = write_instance("vars x y\nx y : [0, 3/2pi)\n");
    let out = run_args(&["solve", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2:"), "position expected in: {err}");
    assert!(err.contains("strictly less than pi"));

    let out = run_args(&["check", "/nonexistent/file.scsp"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn usage_errors_exit_64() {
    let out = run_args(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run_args(&["table", "sphere"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn table_output() {
    let out = run_args(&["table", "proj"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10, "header plus nine rows");
    // N ∘ N = N: second column of the N row is a bare N.
    let n_row = lines[1];
    assert_eq!(
        n_row.trim_start().split_whitespace().next(),
        Some("N"),
        "row: {n_row}"
    );
    let cells: Vec<&str> = n_row.split_whitespace().collect();
    assert_eq!(cells[1], "N");
    // N ∘ S = N|S|EQ in the projection calculus.
    let s_col = 5; // columns: row label, N, NE, E, SE, S, ...
    assert_eq!(cells[s_col], "N|S|EQ");

    let cone = run_args(&["table", "cone"]);
    let cone_text = String::from_utf8_lossy(&cone.stdout);
    let cone_cells: Vec<&str> = cone_text
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .collect();
    assert_eq!(cone_cells[1], "N");
    assert_eq!(
        cone_cells[s_col], "*",
        "opposite cones compose to the universal entry"
    );

    let again = run_args(&["table", "proj"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn option_lines_respected_and_overridden() {
    // steps 1 from the file forces LIMIT; the flag overrides it back.
    let text = format!("option steps 1\n{TWO_BRANCH}");
    let f = write_instance(&text);
    let out = run_args(&["solve", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_args(&["solve", f.path().to_str().unwrap(), "--steps", "1000"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn degenerate_sector_warns_but_parses() {
    let f = write_instance("vars x y\nx y : (0, 0) | eq\n");
    let out = run_args(&["solve", f.path().to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "eq disjunct keeps it satisfiable"
    );
}
