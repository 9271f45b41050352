use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn kab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kab")).args(args).output().unwrap()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_optimistic_reachability() {
    let o = kab(&["verify", path(&fixture("running.kab")), path(&fixture("reach.prop")), "--semantics", "b"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "opt_d: true");
}

#[test]
fn verify_reports_false_properties() {
    let o = kab(&["verify", path(&fixture("running.kab")), path(&fixture("reach.prop")), "--semantics", "c"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_single_formula_and_query_mode() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("one.prop");
    std::fs::write(&p, "mu Z.([G(a)] | <>Z)").unwrap();
    let o = kab(&["verify", path(&fixture("running.kab")), path(&p), "--semantics", "it", "--query-mode", "certain"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "property: true");
}

#[test]
fn it_fragment_gate() {
    let running = fixture("running.kab");
    let props = fixture("running.prop");
    let warn = kab(&["verify", path(&running), path(&props), "--semantics", "eb"]);
    assert!(String::from_utf8_lossy(&warn.stderr).contains("warning"));
    let strict = kab(&["verify", path(&running), path(&props), "--semantics", "eb", "--require-it-fragment"]);
    assert_eq!(strict.status.code(), Some(2));
    let standard = kab(&["verify", path(&running), path(&props), "--semantics", "standard", "--require-it-fragment"]);
    assert_ne!(standard.status.code(), Some(2));
}

#[test]
fn weak_acyclicity() {
    let o = kab(&["wa", path(&fixture("running.kab"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "weakly acyclic");
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let o = kab(&["wa", path(&fixture("running_gcycle.kab")), "--dot", path(&dot)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn build_limit_exit_code() {
    let o = kab(&["build", path(&fixture("running_gcycle.kab")), "--semantics", "standard", "--max-states", "5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn build_exports_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (j1, j2, d) = (dir.path().join("1.json"), dir.path().join("2.json"), dir.path().join("s.dot"));
    for j in [&j1, &j2] {
        let o = kab(&["build", path(&fixture("tickets.kab")), "--semantics", "eb", "--json", path(j), "--dot", path(&d)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let first = std::fs::read(&j1).unwrap();
    assert_eq!(first, std::fs::read(&j2).unwrap());
    let text = String::from_utf8(first).unwrap();
    for key in ["\"semantics\"", "\"states\"", "\"edges\"", "\"initial\"", "\"active_domain\""] {
        assert!(text.contains(key), "{key}");
    }
}

#[test]
fn check_reports_labels_and_inconsistency() {
    let o = kab(&["check", path(&fixture("running.kab"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("@ax1: C disjoint D"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kab");
    std::fs::write(&bad, "TBOX { C disjoint D; } ABOX { C(a); D(a); } PROCESS { }").unwrap();
    let o = kab(&["check", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("inconsistent: violates @ax1"));
    let o = kab(&["build", path(&bad), "--semantics", "b"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn parse_errors_are_positioned() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kab");
    std::fs::write(&bad, "TBOX { C isa ; }").unwrap();
    let o = kab(&["check", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.kab: 1:14:"));
    let o = kab(&["check", "/nonexistent.kab"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repairs_of_the_running_example() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.abox");
    std::fs::write(&a, "ABOX { C(a); D(a); }").unwrap();
    let b = kab(&["repairs", path(&fixture("running.kab")), "--abox", path(&a), "--kind", "b"]);
    assert_eq!(stdout(&b).lines().collect::<Vec<_>>(), ["{C(a)}", "{D(a)}"]);
    let c = kab(&["repairs", path(&fixture("running.kab")), "--abox", path(&a), "--kind", "c"]);
    assert_eq!(stdout(&c).trim(), "{}");
}

#[test]
fn translate_tau_output_parses_back() {
    let o = kab(&["translate-tau", path(&fixture("running.prop"))]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("tau.prop");
    std::fs::write(&p, stdout(&o)).unwrap();
    let v = kab(&["verify", path(&fixture("running.kab")), path(&p), "--semantics", "eb", "--require-it-fragment"]);
    assert_ne!(v.status.code(), Some(2));
}
