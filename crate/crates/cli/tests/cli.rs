//! End-to-end checks of the binary: flags, output formats, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn drg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn analyze_hypercube_json() {
    let out = drg(&[
        "analyze",
        "--graph",
        "hypercube:4",
        "--ordering",
        "all",
        "--output",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let orderings = doc["orderings"].as_array().unwrap();
    assert_eq!(orderings.len(), 2);
    assert_eq!(orderings[0]["verdict"], "StronglyUniform");
    assert_eq!(orderings[1]["verdict"], "NotUniform");
}

#[test]
fn analyze_mcfarland_text_reports_zero_entry() {
    let out = drg(&["analyze", "--graph", "mcfarland:2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("UniformNotStrong"));
    assert!(text.contains("StronglyUniform"));
    // e_2^+ = 0 appears in the e^+ row of the first structure
    assert!(text.contains("e^+ (i=1..D-1): -1/5, 0/1"));
}

#[test]
fn list_shows_constructors() {
    let out = drg(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in ["hypercube:D", "folded:D", "mcfarland:t", "edgefile:PATH"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn unknown_constructor_fails() {
    let out = drg(&["analyze", "--graph", "petersen:1"]);
    assert!(!out.status.success());
}

#[test]
fn subcommand_help_prints_usage() {
    let out = drg(&["analyze", "--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("--graph"));
    assert!(text.contains("--ordering"));
}

#[test]
fn exit_codes_for_bad_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| -> String {
        let p: std::path::PathBuf = Path::new(dir.path()).join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    // path graph: not distance-regular
    let p4 = write("p4.txt", "4 3\n0 1\n1 2\n2 3\n");
    let out = drg(&["analyze", "--graph", &format!("edgefile:{p4}")]);
    assert_eq!(out.status.code(), Some(2));
    // complete graph: not bipartite
    let k4 = write("k4.txt", "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let out = drg(&["analyze", "--graph", &format!("edgefile:{k4}")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn explicit_ordering_flag() {
    let out = drg(&[
        "analyze",
        "--graph",
        "hypercube:4",
        "--ordering",
        "0,3,2,1,4",
        "--output",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["orderings"].as_array().unwrap().len(), 1);
    assert_eq!(doc["orderings"][0]["verdict"], "NotUniform");
}

#[test]
fn vertex_flag_does_not_change_verdicts() {
    let a = drg(&["analyze", "--graph", "hypercube:3", "--output", "json"]);
    let b = drg(&[
        "analyze",
        "--graph",
        "hypercube:3",
        "--vertex",
        "5",
        "--output",
        "json",
    ]);
    let da: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let db: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    assert_eq!(da["orderings"], db["orderings"]);
}
