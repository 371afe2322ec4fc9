use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aqsolve_cli::ResultJson;
use tempfile::TempDir;

const DISK: &str = "(domain (x -2 2) (y -2 2))\n(<= (+ (* x x) (* y y)) 1)\n";
const AMBIVALENT: &str = "(domain (x 0 10))\n(exists :q [3 5] x (and (>= x 0) (<= x 4)))\n";

fn aqsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqsolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn file(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn volume(boxes: &[Vec<[f64; 2]>]) -> f64 {
    boxes
        .iter()
        .map(|b| b.iter().map(|s| s[1] - s[0]).product::<f64>())
        .sum()
}

#[test]
fn solve_writes_a_consistent_document() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "disk.fo", DISK);
    let out = dir.path().join("r.json");
    let o = aqsolve(&[
        "solve",
        "--formula",
        s(&f),
        "--epsilon",
        "0.05",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: ResultJson = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.vars, ["x", "y"]);
    assert!(doc.error < 0.05);
    let (t, u) = (volume(&doc.true_boxes), volume(&doc.unknown_boxes));
    assert!((u - doc.error).abs() <= 1e-9 * doc.error);
    assert!(t <= std::f64::consts::PI && std::f64::consts::PI <= t + u);
    let total = t + u + volume(&doc.false_boxes) + volume(&doc.ambivalent_boxes);
    assert!((total - 16.0).abs() < 1e-9);
}

#[test]
fn solve_prints_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "line.fo", "(<= x 1)");
    let o = aqsolve(&[
        "solve",
        "--formula",
        s(&f),
        "--domain",
        "(domain (x 0 4))",
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: ResultJson = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.true_boxes, vec![vec![[0.0, 1.0]]]);
    // the cell at the boundary x = 1 stays undetermined
    let u = &doc.unknown_boxes;
    assert!(u.len() == 1 && u[0][0][0] == 1.0 && doc.error < 0.1);
    assert_eq!(doc.false_boxes, vec![vec![[u[0][0][1], 4.0]]]);
}

#[test]
fn domain_can_come_from_a_file() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "line.fo", "(>= x 1)");
    let d = file(&dir, "line.dom", "(domain (x 0 2))");
    let o = aqsolve(&[
        "solve",
        "--formula",
        s(&f),
        "--domain",
        s(&d),
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn svg_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "disk.fo", DISK);
    let render = |name: &str| {
        let svg = dir.path().join(name);
        let o = aqsolve(&[
            "solve",
            "--formula",
            s(&f),
            "--epsilon",
            "0.1",
            "--svg",
            s(&svg),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(svg).unwrap()
    };
    let a = render("a.svg");
    assert_eq!(a, render("b.svg"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("<?xml") && text.contains(r#"version="1.1""#));
    for fill in ["#2e9e44", "#d2352b", "#a0a0a0"] {
        assert!(text.contains(fill));
    }
}

#[test]
fn svg_needs_two_free_variables() {
    let dir = TempDir::new().unwrap();
    let f = file(
        &dir,
        "q.fo",
        "(domain (x -2 2) (y -2 2))\n(exists :q [1/2 1] y (<= (+ (* x x) (* y y)) 1))",
    );
    let svg = dir.path().join("q.svg");
    let o = aqsolve(&[
        "solve",
        "--formula",
        s(&f),
        "--epsilon",
        "0.1",
        "--svg",
        s(&svg),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exactly 2 free variables, found 1"));
    assert!(!svg.exists());
}

#[test]
fn eval_reports_verdict_and_witnesses() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "amb.fo", AMBIVALENT);
    let out = dir.path().join("e.json");
    let o = aqsolve(&[
        "eval",
        "--formula",
        s(&f),
        "--epsilon",
        "0.01",
        "--choices",
        "5",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        [
            "ambivalent",
            "true witness: {1: 7/2}",
            "false witness: {1: 9/2}"
        ]
    );
    let doc: ResultJson = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc.verdict.as_deref(), Some("ambivalent"));
    assert_eq!(doc.choices_used["true"]["1"], "7/2");
    assert_eq!(doc.choices_used["false"]["1"], "9/2");
    assert_eq!(doc.ambivalent_boxes, vec![Vec::<[f64; 2]>::new()]);
}

#[test]
fn shared_tags_make_a_contradiction_false() {
    let dir = TempDir::new().unwrap();
    let psi = "(exists :tag 1 :q [3 5] x (and (>= x 0) (<= x 4)))";
    let f = file(
        &dir,
        "c.fo",
        &format!("(domain (x 0 10))\n(and {psi} (not {psi}))"),
    );
    let o = aqsolve(&["eval", "--formula", s(&f), "--epsilon", "0.01"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: ResultJson = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.verdict.as_deref(), Some("false"));
}

#[test]
fn zero_width_annotations_exit_with_budget_failure() {
    let dir = TempDir::new().unwrap();
    let free = file(
        &dir,
        "free.fo",
        "(domain (x -2 2) (y -2 2))\n(exists :q [1 1] y (<= (+ (* x x) (* y y)) 1))",
    );
    let o = aqsolve(&["solve", "--formula", s(&free), "--epsilon", "0.05"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget collapse"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let sentence = file(
        &dir,
        "s.fo",
        "(domain (x 0 10))\n(exists :q [4 4] x (<= x 4))",
    );
    let o = aqsolve(&["eval", "--formula", s(&sentence), "--epsilon", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn box_cap_exits_with_budget_failure() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "disk.fo", DISK);
    let o = aqsolve(&[
        "solve",
        "--formula",
        s(&f),
        "--epsilon",
        "0.001",
        "--max-boxes",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_are_located() {
    let dir = TempDir::new().unwrap();
    let classical = file(&dir, "c.fo", "(domain (x 0 1))\n(exists x (<= x 1))");
    let o = aqsolve(&["solve", "--formula", s(&classical), "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("c.fo:2:") && msg.contains(":q"), "{msg}");

    let undeclared = file(&dir, "u.fo", "(domain (x 0 1))\n(<= (+ x y) 1)");
    let o = aqsolve(&["solve", "--formula", s(&undeclared), "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("u.fo:2:10: undeclared variable `y`"),
        "{}",
        stderr(&o)
    );

    let bare = file(&dir, "b.fo", "(<= x 1)");
    let o = aqsolve(&["solve", "--formula", s(&bare), "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no domain"));

    let o = aqsolve(&[
        "solve",
        "--formula",
        s(&bare),
        "--domain",
        "(domain (x 0 1))",
        "--epsilon",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = aqsolve(&[
        "solve",
        "--formula",
        s(&dir.path().join("missing.fo")),
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));

    let o = aqsolve(&["solve", "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}
