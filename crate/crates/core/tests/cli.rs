use std::path::Path;
use std::process::{Command, Output};

const P2: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/p2.conf");

fn goodwill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goodwill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn solve_writes_every_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = goodwill(&["solve", P2, "--out", dir.path().to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let ss = read(dir.path(), "steady_states.csv");
    let mut lines = ss.lines();
    assert!(lines.next().unwrap().starts_with("concept,A,q,k,"));
    let open = lines.find(|l| l.starts_with("open_loop,")).unwrap();
    assert!(open.starts_with("open_loop,1.25,0.9,0.125,"), "{open}");
    assert!(open.ends_with(",saddle"));

    let path = read(dir.path(), "path_closed_loop.csv");
    assert_eq!(path.lines().next(), Some("t,A,lambda,k,q"));
    assert!(read(dir.path(), "comparison.txt").contains("self-consistent: true"));
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let out = goodwill(&[
        "solve",
        P2,
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "steady_states.json")).unwrap();
    assert_eq!(rows[0]["concept"], "open_loop");
    let cmp: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "comparison.json")).unwrap();
    assert_eq!(cmp["closed_vs_open"]["verdict"], "holds");
}

#[test]
fn sweep_has_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = goodwill(&[
        "sweep",
        P2,
        "--axis",
        "sigma",
        "--lo",
        "30",
        "--hi",
        "50",
        "--steps",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(read(dir.path(), "sweep.csv").lines().count(), 6);

    let out = goodwill(&[
        "sweep",
        P2,
        "--axis",
        "zeta",
        "--lo",
        "0",
        "--hi",
        "1",
        "--steps",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_scenario_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "[model]\nfamily = lq\nB = -1\n").unwrap();
    let out = goodwill(&[
        "check",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn check_prints_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = goodwill(&["check", P2, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("closed loop vs open loop: holds"), "{text}");
    assert!(text.contains("feedback vs closed loop: holds"));
}
