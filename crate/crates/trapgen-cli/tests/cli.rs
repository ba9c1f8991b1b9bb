//! Black-box tests of the `trapgen` binary: exit codes, wire formats, and
//! reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn trapgen() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trapgen"))
}

fn run(args: &[&str]) -> Output {
    trapgen().args(args).output().expect("binary runs")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn generalize_prints_region() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (< x 5)) (reference (x 3))");
    let out = run(&["generalize", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "(region + ((< x 5)))\n");
}

#[test]
fn generalize_without_reference_needs_solve() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (< x 5))");
    let out = run(&["generalize", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["generalize", file.to_str().unwrap(), "--solve"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unsatisfiable_with_solve_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (< x x))");
    let out = run(&["generalize", file.to_str().unwrap(), "--solve"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)");
    let out = run(&["generalize", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1"), "diagnostic with position, got: {err}");
}

#[test]
fn sample_emits_reproducible_satisfying_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(
        dir.path(),
        "p.trap",
        "(vars (x int)) (assert (and (<= 0 x) (<= x 3))) (reference (x 1))",
    );
    let args = ["sample", file.to_str().unwrap(), "--count", "50", "--seed", "9"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    let lines: Vec<i64> = stdout(&first)
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(lines.len(), 50);
    assert!(lines.iter().all(|&x| (0..=3).contains(&x)));

    // Identical invocation, byte-identical output; a different seed differs.
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let other = run(&["sample", file.to_str().unwrap(), "--count", "50", "--seed", "10"]);
    assert_ne!(first.stdout, other.stdout);
}

#[test]
fn sample_count_zero_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (< x 5)) (reference (x 0))");
    let out = run(&["sample", file.to_str().unwrap(), "--count", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn negative_region_samples_falsify_a_bound() {
    // Reference falsifies x < 5, so the region is the complement of x >= 5;
    // every sample violates that body bound, i.e. satisfies the region.
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (< x 5)) (reference (x 9))");
    let out = run(&["sample", file.to_str().unwrap(), "--count", "30", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        let x: i64 = line.parse().unwrap();
        assert!(x < 5, "sample {x} does not satisfy the complement region");
    }
}

#[test]
fn check_passes_and_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(
        dir.path(),
        "p.trap",
        "(vars (x int) (q rat)) (assert (or (< q x) (= x 2))) (reference (x 2) (q 3/2))",
    );
    let out = run(&["check", file.to_str().unwrap(), "--box", "-8", "8", "--denom", "2"]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("PASS"));

    let out = run(&[
        "check",
        file.to_str().unwrap(),
        "--box",
        "-8",
        "8",
        "--denom",
        "2",
        "--inject-bad-region",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn heatmap_projects_two_variables() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(
        dir.path(),
        "p.trap",
        "(vars (a rat) (b rat)) (assert (and (< a b) (< b 4))) (reference (a 0) (b 1))",
    );
    let out = run(&["heatmap", file.to_str().unwrap(), "--vars", "a", "b", "--count", "1", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert_eq!(text.trim().split(',').count(), 2);

    let out = run(&["heatmap", file.to_str().unwrap(), "--vars", "a", "nope", "--count", "1", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fuzz_delivers_all_vectors_to_a_sink() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (< x 5)) (reference (x 0))");
    // Line-counting sink: consumes stdin until EOF, exits 0.
    let sink = write_file(dir.path(), "sink.sh", "wc -l > /dev/null\n");
    let out = run(&[
        "fuzz",
        file.to_str().unwrap(),
        "--cmd",
        &format!("sh {}", sink.display()),
        "--count",
        "5000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("vectors 5000"), "got: {text}");
    assert!(text.contains("crashes 0"), "got: {text}");
}

#[test]
fn fuzz_records_crash_and_vector() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (= x 7)) (reference (x 7))");
    // The formula forces x = 7 and the target dies on the first 7 it reads.
    let crasher = write_file(
        dir.path(),
        "crash.sh",
        "while read line; do case \"$line\" in *7*) exit 1;; esac; done\n",
    );
    let out = run(&[
        "fuzz",
        file.to_str().unwrap(),
        "--cmd",
        &format!("sh {}", crasher.display()),
        "--count",
        "1",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("vectors 1"), "got: {text}");
    assert!(text.contains("crashes 1"), "got: {text}");
    assert!(text.contains("first_crash_vector 7"), "got: {text}");
}

#[test]
fn fuzz_continues_through_crashes() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (= x 7)) (reference (x 7))");
    let crasher = write_file(dir.path(), "crash.sh", "read line; exit 1\n");
    let out = run(&[
        "fuzz",
        file.to_str().unwrap(),
        "--cmd",
        &format!("sh {}", crasher.display()),
        "--count",
        "25",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("vectors 25"), "all vectors delivered, got: {text}");
    let crashes: u64 = text
        .lines()
        .find_map(|l| l.strip_prefix("crashes "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(crashes >= 1, "got: {text}");
    assert!(text.contains("first_crash_vector 7"), "got: {text}");
}

#[test]
fn fuzz_nonexistent_target_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "p.trap", "(vars (x int)) (assert (< x 5)) (reference (x 0))");
    let out = run(&[
        "fuzz",
        file.to_str().unwrap(),
        "--cmd",
        "/does/not/exist",
        "--count",
        "5",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
