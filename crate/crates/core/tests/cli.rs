//! The command-line tool end to end, including its exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tomtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomtree")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn simulated(dir: &TempDir) -> std::path::PathBuf {
    let tree = dir.path().join("tree.jsonl");
    let o = tomtree(&[
        "--seed",
        "3",
        "--out",
        p(&tree),
        "simulate",
        "--birth-rate",
        "1",
        "--lifetime",
        "exp:1.5",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    tree
}

#[test]
fn encode_decode_round_trip() {
    let dir = TempDir::new().unwrap();
    let tree = simulated(&dir);
    let csv = dir.path().join("c.csv");
    let svg = dir.path().join("c.svg");
    assert_eq!(
        code(&tomtree(&["--out", p(&csv), "encode", p(&tree), "--svg", p(&svg)])),
        0
    );
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let back = dir.path().join("back.jsonl");
    assert_eq!(code(&tomtree(&["--out", p(&back), "decode", p(&csv)])), 0);
    // Ids are relabelled in exploration order, so compare through the contour.
    let o = tomtree(&["encode", p(&back)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), fs::read_to_string(&csv).unwrap());
    assert_eq!(
        stdout(&tomtree(&["dist", p(&tree), p(&back)])).lines().nth(1),
        Some("0")
    );
}

#[test]
fn same_seed_same_output() {
    let a = tomtree(&["--seed", "9", "simulate", "--lifetime", "exp:1"]);
    let b = tomtree(&["--seed", "9", "simulate", "--lifetime", "exp:1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn truncate_tree_matches_truncated_contour() {
    let dir = TempDir::new().unwrap();
    let tree = simulated(&dir);
    let csv = dir.path().join("c.csv");
    let cut = dir.path().join("cut.jsonl");
    assert_eq!(code(&tomtree(&["--out", p(&csv), "encode", p(&tree)])), 0);
    assert_eq!(
        code(&tomtree(&["--out", p(&cut), "truncate", p(&tree), "--r", "0.4"])),
        0
    );
    let via_tree = tomtree(&["encode", p(&cut)]);
    let via_contour = tomtree(&["truncate", p(&csv), "--r", "0.4"]);
    assert_eq!(stdout(&via_tree), stdout(&via_contour));
}

#[test]
fn xi_and_dist() {
    let dir = TempDir::new().unwrap();
    let tree = simulated(&dir);
    let csv = dir.path().join("c.csv");
    assert_eq!(code(&tomtree(&["--out", p(&csv), "encode", p(&tree)])), 0);
    let a = tomtree(&["xi", p(&tree), "--t", "0.1"]);
    let b = tomtree(&["xi", p(&csv), "--t", "0.1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let d = tomtree(&["dist", p(&tree), p(&csv)]);
    assert_eq!(code(&d), 0);
    assert_eq!(stdout(&d).lines().nth(1), Some("0"));
}

#[test]
fn levy_sample_writes_csv() {
    let o = tomtree(&[
        "levy",
        "sample",
        "--jump-rate",
        "1",
        "--jump-law",
        "exp:2",
        "--horizon",
        "3",
        "--kill-at-zero",
    ]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).is_empty());
}

#[test]
fn passing_and_failing_tests_have_distinct_codes() {
    assert_eq!(code(&tomtree(&["--seed", "1", "test", "splitting", "--n", "500"])), 0);
    assert_eq!(
        code(&tomtree(&[
            "--seed",
            "1",
            "test",
            "splitting",
            "--n",
            "500",
            "--null-rate",
            "2"
        ])),
        2
    );
    assert_eq!(code(&tomtree(&["test", "binary", "--n", "50"])), 0);
    assert_eq!(code(&tomtree(&["test", "sojourn", "--n", "50"])), 0);
    let consistency = [
        "test",
        "consistency",
        "--jump-rate",
        "2",
        "--jump-law",
        "exp:1",
        "--n",
        "500",
    ];
    assert_eq!(code(&tomtree(&consistency)), 0);
    let mut control = consistency.to_vec();
    control.push("--control");
    assert_eq!(code(&tomtree(&control)), 2);
}

#[test]
fn saved_config_replays() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    let a = tomtree(&[
        "--seed",
        "4",
        "--save-config",
        p(&cfg),
        "simulate",
        "--lifetime",
        "exp:2",
    ]);
    let b = tomtree(&["run", p(&cfg)]);
    assert_eq!(code(&b), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let tree = simulated(&dir);
    let missing = dir.path().join("missing.jsonl");
    let garbage = dir.path().join("garbage.jsonl");
    fs::write(&garbage, "{not json\n").unwrap();
    let bad_csv = dir.path().join("bad.csv");
    fs::write(&bad_csv, "kind,a,b\njump,1,\nfall,2,1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["encode", p(&missing)],
        vec!["encode", p(&garbage)],
        vec!["decode", p(&bad_csv)],
        vec!["truncate", p(&tree), "--r", "-1"],
        vec!["xi", p(&tree), "--t", "1e9"],
        vec!["simulate", "--lifetime", "exp:-1"],
        vec!["simulate", "--lifetime", "nonsense"],
        vec!["simulate", "--birth-rate", "3", "--lifetime", "exp:1"],
        vec!["levy", "sample", "--drift", "0"],
        vec!["test", "consistency", "--r1", "5", "--r2", "4"],
        vec!["run", p(&missing)],
        vec!["no-such-command"],
        vec!["simulate", "--birth-rate", "fast"],
    ];
    for args in cases {
        let o = tomtree(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty(), "{args:?} gave no message");
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&tomtree(&["--help"])), 0);
    assert_eq!(code(&tomtree(&["--version"])), 0);
}
