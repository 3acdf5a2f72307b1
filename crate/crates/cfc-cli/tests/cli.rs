//! End-to-end tests that drive the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_cfc");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("LOG_LEVEL", "error")
        .output()
        .expect("binary should run")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .env("LOG_LEVEL", "error")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary should spawn");
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary should finish")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

fn write_graph(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const C5: &str = "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n";
const P3: &str = "3 2\n0 1\n1 2\n";

#[test]
fn cfc_on_c5_prints_two_and_exits_zero() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "c5.txt", C5);
    let out = run(&["cfc", &g]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    assert_eq!(stdout_str(&out).trim(), "2");
}

#[test]
fn cfc_exits_one_when_palette_is_too_small() {
    // a path on 3 vertices needs 2 colors, so max-k 1 is refuted
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "p3.txt", P3);
    let out = run(&["cfc", &g, "--max-k", "1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cfc_exits_three_when_over_edge_budget() {
    let dir = TempDir::new().unwrap();
    let mut edges = Vec::new();
    for u in 0..8u32 {
        edges.push((u.min((u + 1) % 8), u.max((u + 1) % 8)));
        edges.push((u.min((u + 2) % 8), u.max((u + 2) % 8)));
    }
    edges.sort_unstable();
    edges.dedup();
    assert!(edges.len() > 12);
    let mut text = format!("8 {}\n", edges.len());
    for (u, v) in &edges {
        text.push_str(&format!("{u} {v}\n"));
    }
    let g = write_graph(dir.path(), "dense.txt", &text);
    let out = run(&["cfc", &g, "--budget", "12"]);
    assert_eq!(code(&out), 3);
    assert!(stderr_str(&out).contains("budget"));
}

#[test]
fn unknown_flag_exits_two() {
    let out = run(&["cfc", "--no-such-flag"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_edge_list_reports_line_and_exits_two() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "bad.txt", "3 2\n0 1\nnope\n");
    let out = run(&["cfc", &g]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr_str(&out).contains("line 3"),
        "stderr should name the offending line: {}",
        stderr_str(&out)
    );
}

#[test]
fn graph_reads_from_stdin_dash() {
    let out = run_stdin(&["cfc", "-"], C5);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_str(&out).trim(), "2");
}

#[test]
fn gen_then_analyze_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.txt");
    let out = run(&[
        "gen",
        "--model",
        "gnp",
        "--n",
        "40",
        "--p",
        "0.2",
        "--seed",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));

    let text = fs::read_to_string(&path).unwrap();
    let header: Vec<usize> = text
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(header[0], 40);
    assert_eq!(header[1], text.lines().count() - 1);

    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["n"], 40);
    assert_eq!(doc["m"], header[1]);
    assert!(doc["connected"].is_boolean());
}

#[test]
fn analyze_json_keys_are_sorted() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "c5.txt", C5);
    let out = run(&["analyze", &g, "--p", "0.5", "--trials", "5"]);
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    // serde_json::Value uses a sorted map, so top-level keys must appear in order
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = doc.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
    // and the raw text should put "bridges" before "connected" before "n"
    let b = text.find("\"bridges\"").unwrap();
    let c = text.find("\"connected\"").unwrap();
    let n = text.find("\"n\"").unwrap();
    assert!(b < c && c < n);
}

#[test]
fn color_then_check_is_certified() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "c5.txt", C5);
    let col = dir.path().join("col.txt");
    let cert = dir.path().join("cert.json");
    let out = run(&[
        "color",
        &g,
        "--out",
        col.to_str().unwrap(),
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));

    let cert_doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(cert_doc["status"], "certified");

    let out = run(&["check", &g, "--coloring", col.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["status"], "certified");
}

#[test]
fn check_refutes_monochromatic_path_and_names_pair() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "p3.txt", P3);
    let col = write_graph(dir.path(), "mono.txt", "2 1\n0 1\n1 1\n");
    let out = run(&["check", &g, "--coloring", &col]);
    assert_eq!(code(&out), 1);
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["status"], "refuted");
    assert_eq!(doc["failing_pair"], serde_json::json!([0, 2]));
}

#[test]
fn check_rejects_coloring_for_wrong_edge_count() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "c5.txt", C5);
    let col = write_graph(dir.path(), "short.txt", "3 2\n0 1\n1 2\n2 1\n");
    let out = run(&["check", &g, "--coloring", &col]);
    assert_eq!(code(&out), 2);
}

#[test]
fn color_fails_with_budget_code_on_a_path() {
    // paths have no Hamilton cycle, so the construction must give up with code 3
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "p4.txt", "4 3\n0 1\n1 2\n2 3\n");
    let out = run(&["color", &g]);
    assert_eq!(code(&out), 3);
    assert!(stderr_str(&out).contains("Hamilton"));
}

#[test]
fn color_rejects_disconnected_input_as_user_error() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "split.txt", "4 2\n0 1\n2 3\n");
    let out = run(&["color", &g]);
    assert_eq!(code(&out), 2);
}

#[test]
fn ham_finds_cycle_on_c6_and_fails_on_tree() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "c6.txt", "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n");
    let out = run(&["ham", &g]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let line = stdout_str(&out);
    let verts: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(verts.len(), 6);

    let t = write_graph(dir.path(), "p3.txt", P3);
    let out = run(&["ham", &t]);
    assert_eq!(code(&out), 1);
    assert!(stdout_str(&out).contains("NOT FOUND"));
}

#[test]
fn gen_outputs_are_byte_identical_across_reruns() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let out = run(&[
            "gen",
            "--model",
            "regular",
            "--n",
            "30",
            "--r",
            "3",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn experiment_outputs_are_byte_identical_across_reruns() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let mut stdouts = Vec::new();
    for path in [&a, &b] {
        let out = run(&[
            "experiment",
            "--mode",
            "offset-a",
            "--n",
            "60",
            "--param",
            "0.5",
            "--trials",
            "8",
            "--seed",
            "4",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
        stdouts.push(out.stdout);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(stdouts[0], stdouts[1]);
}

#[test]
fn experiment_csv_has_pinned_header() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("t.csv");
    let out = run(&[
        "experiment",
        "--mode",
        "alpha",
        "--n",
        "40",
        "--param",
        "1.5",
        "--trials",
        "3",
        "--seed",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "trial,seed,n,p,connected,method,bound,certified"
    );
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn gen_rejects_mismatched_model_parameters() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("x.txt");
    let out = run(&[
        "gen", "--model", "gnp", "--n", "10", "--r", "3", "--seed", "1", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let out = run(&[
        "gen", "--model", "regular", "--n", "10", "--p", "0.5", "--seed", "1", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn log_level_debug_keeps_stdout_clean() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "c5.txt", C5);
    let quiet = run(&["cfc", &g]);
    let noisy = Command::new(BIN)
        .args(["cfc", &g])
        .env("LOG_LEVEL", "debug")
        .output()
        .expect("binary should run");
    assert_eq!(quiet.stdout, noisy.stdout);
    assert_eq!(code(&noisy), 0);
}

#[test]
fn missing_input_file_exits_two() {
    let out = run(&["analyze", "/no/such/file.txt"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("/no/such/file.txt"));
}
