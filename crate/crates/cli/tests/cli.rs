use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use biembed::cgfile;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn biembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biembed"))
        .args(args)
        .env_remove("CG_SEARCH_BUDGET")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bounds_examples() {
    let o = biembed(&["bounds", "--bigenus-lower", "21"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "8\n"));
    let o = biembed(&["bounds", "--bichromatic", "1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "13\n"));
    let o = biembed(&["bounds", "--bichromatic", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("genus must be at least 1"));
    let o = biembed(&["bounds", "--b-of-s", "1"]);
    assert_eq!(stdout(&o), "61\n");
    let o = biembed(&["bounds", "--edge-bound", "21", "--genus", "8"]);
    assert_eq!(stdout(&o), "105\n");
    assert_eq!(code(&biembed(&["bounds"])), 2);
    assert_eq!(code(&biembed(&["bounds", "--bichromatic", "1", "--b-of-s", "1"])), 2);
}

#[test]
fn golden_files_round_trip() {
    for name in ["k21_A.cg", "k21_B.cg", "k21_swap_A.cg", "k21_swap_B.cg"] {
        let text = fs::read_to_string(golden(name)).unwrap();
        let f = cgfile::parse(&text).unwrap();
        assert_eq!(cgfile::render(&f), text, "{name}");
        assert_eq!(cgfile::parse(&cgfile::render(&f)).unwrap(), f);
    }
}

#[test]
fn verify_golden_pair_reproduces_certificate() {
    let o = biembed(&["verify", p(&golden("k21_A.cg")), p(&golden("k21_B.cg"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), fs::read_to_string(golden("k21_certificate.json")).unwrap());
    let cert: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["genera"]["A"], 8);
    assert_eq!(cert["genera"]["B"], 8);
    assert_eq!(cert["partitionOK"], true);
}

#[test]
fn certificate_field_order_is_fixed() {
    let text = fs::read_to_string(golden("k21_certificate.json")).unwrap();
    let keys = [
        "\"n\"", "\"vA\"", "\"vB\"", "\"E1\"", "\"E2\"", "\"E3\"", "\"E4\"", "\"E5\"", "\"E6\"",
        "\"logs\"", "\"genera\"", "\"triangular\"", "\"connected\"", "\"partitionOK\"",
    ];
    let at: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]));
    assert!(!text.contains("stats"));
}

#[test]
fn verify_failing_pairing_lists_residues() {
    let a = p(&golden("k21_A.cg")).to_string();
    let o = biembed(&["verify", &a, &a]);
    assert_eq!(code(&o), 5);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["E5"], false);
    assert_eq!(cert["valid"], false);
    assert!(stderr(&o).contains("residues in both ["));
}

#[test]
fn zero_current_is_a_parse_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(golden("k21_A.cg")).unwrap();
    let broken = text.replacen("edge 0 0 1 2", "edge 0 0 1 0", 1);
    assert_ne!(broken, text);
    let path = dir.path().join("zero.cg");
    fs::write(&path, broken).unwrap();
    let o = biembed(&["verify", p(&path), p(&golden("k21_B.cg"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 4: current 0"), "{}", stderr(&o));
}

#[test]
fn derive_and_check_rotations() {
    let dir = tempfile::tempdir().unwrap();
    let rot = dir.path().join("a.rot");
    let o = biembed(&["derive", p(&golden("k21_A.cg")), "--out", p(&rot)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&rot).unwrap();
    assert_eq!(text.lines().count(), 21);
    for (i, line) in text.lines().enumerate() {
        assert!(line.starts_with(&format!("{i}:")));
    }
    let o = biembed(&["check-rotations", p(&rot)]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["triangular"], true);
    assert_eq!(report["genus"], 8);
    assert_eq!(report["faces"], 70);

    // drop one neighbor: no longer a rotation system of a simple graph
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[0] = lines[0].rsplit_once(' ').unwrap().0.to_string();
    let bad = dir.path().join("bad.rot");
    fs::write(&bad, lines.join("\n")).unwrap();
    assert_eq!(code(&biembed(&["check-rotations", p(&bad)])), 5);
}

#[test]
fn derive_rejects_wrong_index() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("digon.cg");
    fs::write(
        &path,
        "group 3\nvertices 2\nedge 0 0 1 1\nedge 1 0 1 2\nrot 0 0+ 1+\nrot 1 0- 1-\n",
    )
    .unwrap();
    let o = biembed(&["derive", p(&path)]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("index 2"), "{}", stderr(&o));
}

#[test]
fn swap_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (golden("k21_A.cg"), golden("k21_B.cg"));
    let out = dir.path().join("one");
    let o = biembed(&["swap", p(&a), p(&b), "--k", "1", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("genera 1 15"));
    assert_eq!(fs::read(out.join("A.cg")).unwrap(), fs::read(golden("k21_swap_A.cg")).unwrap());
    assert_eq!(fs::read(out.join("B.cg")).unwrap(), fs::read(golden("k21_swap_B.cg")).unwrap());

    let out = dir.path().join("zero");
    let o = biembed(&["swap", p(&a), p(&b), "--k", "0", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(out.join("A.cg")).unwrap(), fs::read(&a).unwrap());
    assert_eq!(fs::read(out.join("B.cg")).unwrap(), fs::read(&b).unwrap());
    assert!(out.join("certificate.json").exists());

    let o = biembed(&["swap", p(&a), p(&b), "--k", "2", "--out", p(&dir.path().join("two"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("at most 1"));
}

#[test]
fn search_usage_and_budget() {
    assert_eq!(code(&biembed(&["search", "--s", "-1"])), 2);
    assert_eq!(code(&biembed(&["search", "--s", "5"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_biembed"))
        .args(["search", "--s", "0", "--out", p(dir.path())])
        .env("CG_SEARCH_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(!dir.path().join("A.cg").exists());
}

#[test]
fn search_writes_pair_and_stats_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let o = biembed(&["search", "--s", "0", "--out", p(dir.path()), "--stats"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["valid"], true);
    assert!(cert["stats"]["nodes"].as_u64().unwrap() > 0);
    for f in ["A.cg", "B.cg"] {
        let g = cgfile::parse(&fs::read_to_string(dir.path().join(f)).unwrap()).unwrap();
        assert_eq!(g.graph.vertex_count(), 10);
    }
}

#[test]
fn search_all_enumerates_distinct_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let o = biembed(&["search", "--s", "0", "--all", "--max-nodes", "200", "--out", p(dir.path()), "--threads", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let count: usize = stdout(&o)
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(count > 1);
    let mut seen = std::collections::HashSet::new();
    for k in 0..count {
        let a = fs::read_to_string(dir.path().join(format!("A-{k:03}.cg"))).unwrap();
        let b = fs::read_to_string(dir.path().join(format!("B-{k:03}.cg"))).unwrap();
        let body = |t: &str| t.lines().skip(1).collect::<Vec<_>>().join("\n");
        assert!(seen.insert((body(&a), body(&b))));
        let cert = fs::read_to_string(dir.path().join(format!("certificate-{k:03}.json"))).unwrap();
        assert!(cert.contains("\"valid\": true"));
    }
}
