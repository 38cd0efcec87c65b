use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn mmsnp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmsnp")).args(args).output().expect("binary runs")
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parse_prints_the_sentence_back() {
    let o = mmsnp(&["parse", path(&fixture("twocol.mmsnp"))]);
    assert_eq!(o.status.code(), Some(0));
    let again = mmsnp::textio::parse_sentence(&stdout(&o)).unwrap();
    let orig = mmsnp::textio::parse_sentence(&std::fs::read_to_string(fixture("twocol.mmsnp")).unwrap()).unwrap();
    assert_eq!(again, orig);
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mmsnp");
    std::fs::write(&bad, "signature { E/2 } forbid { E(x) }").unwrap();
    let o = mmsnp(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn normalize_twice_is_a_fixpoint_on_file_content() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mmsnp");
    let b = dir.path().join("b.mmsnp");
    let o = mmsnp(&["normalize", path(&fixture("p3.mmsnp")), "-o", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = mmsnp(&["normalize", a.to_str().unwrap(), "-o", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
}

#[test]
fn transformed_files_parse_again() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["snf", "precolour"] {
        let out = dir.path().join(format!("{cmd}.mmsnp"));
        let o = mmsnp(&[cmd, path(&fixture("twocol.mmsnp")), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        mmsnp::textio::parse_sentence(&std::fs::read_to_string(&out).unwrap()).unwrap();
    }
    let parts = dir.path().join("parts");
    let o = mmsnp(&["decompose", path(&fixture("twocol.mmsnp")), "-o", parts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(&parts).unwrap().count(), 1);
}

#[test]
fn containment_exit_codes() {
    let o = mmsnp(&["contains", path(&fixture("twocol.mmsnp")), path(&fixture("threecol.mmsnp"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recolouring"));
    let o = mmsnp(&["contains", path(&fixture("threecol.mmsnp")), path(&fixture("twocol.mmsnp"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample"));
}

#[test]
fn check_exit_codes() {
    let o = mmsnp(&["check", path(&fixture("k3.struct")), path(&fixture("threecol.mmsnp"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = mmsnp(&["check", path(&fixture("k3.struct")), path(&fixture("twocol.mmsnp"))]);
    assert_eq!(o.status.code(), Some(1));
    // every 2-colouring of K5 has a monochromatic triangle
    let o = mmsnp(&["check", path(&fixture("k5.struct")), path(&fixture("monotri.mmsnp"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_json_report() {
    let o = mmsnp(&["classify", path(&fixture("threecol.mmsnp")), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["overall"], "NP-complete");
    let c = &v["components"][0];
    for key in ["sentence", "verdict", "witness", "stats"] {
        assert!(c.get(key).is_some(), "{key}");
    }
    assert!(v["caveats"].as_array().unwrap().is_empty());
}

#[test]
fn classify_explain_shows_the_witness() {
    let o = mmsnp(&["classify", path(&fixture("twocol.mmsnp")), "--explain"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("overall: P"));
    assert!(s.contains("siggers operation"));
}

#[test]
fn budget_exhaustion_exits_with_two() {
    let o = mmsnp(&["classify", path(&fixture("threecol.mmsnp")), "--max-nodes", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_mmsnp"))
        .args(["classify", path(&fixture("threecol.mmsnp"))])
        .env("MMSNP_BUDGET_MAX_CEGAR_ITERS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn chi_writes_a_structure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chi.struct");
    let o = mmsnp(&["chi", path(&fixture("monotri.mmsnp")), "--colour", "Magenta", "--depth", "2", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let a = mmsnp::textio::parse_structure(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(a.len(), 7);
}

#[test]
fn directory_mode_processes_every_sentence() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["twocol.mmsnp", "threecol.mmsnp", "onecol.mmsnp"] {
        std::fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    let out = dir.path().join("out");
    let o = mmsnp(&["normalize", dir.path().to_str().unwrap(), "-o", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 3);
    let o = mmsnp(&["classify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("== ").count(), 3);
}
