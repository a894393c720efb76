mod common;

use std::process::Command;

use common::data_path;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qident")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn text_and_latex_output() {
    let g = data_path("cancellation.graph");
    let g = g.to_str().unwrap();
    let (code, text) = run(&["identify", "--graph", g, "--do", "X", "--outcome", "Y", "--given", "W"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("P_x(y | w) = "), "{text}");
    let (code, tex) = run(&[
        "identify",
        "--graph",
        g,
        "--do",
        "X",
        "--outcome",
        "Y",
        "--given",
        "W",
        "--format",
        "latex",
    ]);
    assert_eq!(code, 0);
    assert!(tex.contains("\\frac") || tex.contains("\\sum"), "{tex}");
}

#[test]
fn not_identified_text_names_the_reason() {
    let g = data_path("cancellation.graph");
    let (code, text) = run(&[
        "identify",
        "--graph",
        g.to_str().unwrap(),
        "--do",
        "X",
        "--outcome",
        "Y,W",
    ]);
    assert_eq!(code, 2);
    assert!(text.contains("not identified"), "{text}");
    assert!(text.contains("{W}"), "{text}");
}

#[test]
fn graph_file_round_trips_through_components() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.graph");
    std::fs::write(&path, "# tiny\nnode U\nnode A\nnode B\nA -> B\nA <-> B\n").unwrap();
    let (code, text) = run(&["components", "--graph", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(text.trim(), "{U} {A,B}");
}
