//! Black-box checks of the `pfgame` binary: exit codes, human-readable
//! goldens, the JSON report envelope, and graph export.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pfgame"))
}

fn data(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(file)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn help_exits_zero_and_lists_subcommands() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for sub in [
        "decide-existence",
        "decide-uniqueness",
        "solve",
        "mean-payoff",
        "signature",
        "recession",
        "export",
        "tensor-decide",
        "tensor-solve",
    ] {
        assert!(text.contains(sub), "--help does not mention {sub}");
    }
}

#[test]
fn unknown_flag_exits_one() {
    let out = run(&["decide-existence", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("error"));
}

#[test]
fn missing_file_exits_one_with_context() {
    let out = run(&["decide-existence", "/nonexistent/op.op"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("cannot read /nonexistent/op.op"));
}

#[test]
fn existence_verdict_golden() {
    let file = data("running_example.op");
    let out = run(&["decide-existence", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_of(&out),
        "no disjoint dominions: every additive perturbation has an eigenvector\n"
    );
}

#[test]
fn uniqueness_verdict_golden() {
    let file = data("running_example.op");
    let out = run(&["decide-uniqueness", file.to_str().unwrap(), "--at", "0,0,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_of(&out),
        "at u = (0, 0, 2): disjoint dominions: Min has {1,2}, Max has {3}\n\
         second eigenvector: (0, 0, 2.5) (differs nonconstantly)\n"
    );
}

#[test]
fn tensor_verdict_golden() {
    let file = data("example_tensor.tns");
    let out = run(&["tensor-decide", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_of(&out),
        "positive eigenvector for every positive instance: YES\nfinal class {1,2}\n"
    );
}

#[test]
fn undetermined_solve_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("drift.op");
    std::fs::write(&op, "operator n=2\nT1 := 1 + x1\nT2 := x2\n").unwrap();
    let json = dir.path().join("report.json");
    let out = run(&[
        "solve",
        op.to_str().unwrap(),
        "--max-iters",
        "200",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_of(&out).starts_with("undetermined: no convergence after 200 iterations"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["result"]["status"], "undetermined");
    assert_eq!(report["result"]["iterations"], 200);
}

#[test]
fn json_envelope_is_deterministic_modulo_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let file = data("running_example.op");
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let json = dir.path().join(name);
        let out = run(&[
            "decide-uniqueness",
            file.to_str().unwrap(),
            "--at",
            "0,0,2",
            "--json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let mut report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(report["schema"], "pfgame/1");
        assert_eq!(report["command"], "decide-uniqueness");
        assert!(report["timestamp"].is_u64());
        report.as_object_mut().unwrap().remove("timestamp");
        reports.push(report);
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0]["result"]["verdict"], "disjoint-dominions");
    assert_eq!(reports[0]["result"]["I"], serde_json::json!([1, 2]));
    assert_eq!(reports[0]["result"]["J"], serde_json::json!([3]));
}

#[test]
fn export_writes_the_minimal_arc_figure() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("hminus.dot");
    let file = data("running_example.op");
    let out = run(&[
        "export",
        file.to_str().unwrap(),
        "--graph",
        "hminus",
        "--minimal",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&dot).unwrap();
    assert_eq!(
        written,
        "digraph {\n  1 [shape=circle];\n  2 [shape=circle];\n  3 [shape=circle];\n\
         \x20 2 -> 1;\n  3 -> 1;\n  1 -> 2;\n  3 -> 2;\n}\n"
    );
}

#[test]
fn export_rejects_base_point_for_infinity_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("out.dot");
    let file = data("running_example.op");
    let out = run(&[
        "export",
        file.to_str().unwrap(),
        "--graph",
        "hminus",
        "--at",
        "0,0,2",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--at does not apply to hminus"));

    let out = run(&[
        "export",
        file.to_str().unwrap(),
        "--graph",
        "hu-minus",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "local graphs require --at");
}

#[test]
fn signature_and_recession_round_trip_through_the_parser() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("means.op");
    std::fs::write(
        &op,
        "operator n=2\n\
         T1 := mean(2; 0.25:x1, 0.75:x2)\n\
         T2 := mean(-inf; 0.5:x1, 0.5:1 + x2)\n",
    )
    .unwrap();

    let out = run(&["signature", op.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let parsed = pfgame::parse_operator(&text).expect("printed signature re-parses");
    assert_eq!(pfgame::print_operator(&parsed), text);
    assert!(text.contains("T1 := mean(+inf; 0.25:x1, 0.75:x2)"));
    assert!(text.contains("T2 := mean(-inf; 0.5:x1, 0.5:x2)"));

    let out = run(&["recession", op.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let parsed = pfgame::parse_operator(&text).expect("printed recession re-parses");
    assert_eq!(pfgame::print_operator(&parsed), text);
    assert!(text.contains("T1 := max(x1, x2)"));
    assert!(text.contains("T2 := min(x1, x2)"));
}

#[test]
fn mean_payoff_requires_a_positive_horizon() {
    let file = data("running_example.op");
    let out = run(&["mean-payoff", file.to_str().unwrap(), "--k", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--k must be at least 1"));
}
