use std::process::{Command, Output};

fn quadpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadpart"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_builtin_tables() {
    let o = quadpart(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS, 12 fixtures"));
}

#[test]
fn corrupted_fixture_fails_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/table2.json"))
        .unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&src).unwrap();
    doc["rows"][3][2] = serde_json::json!(14);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = quadpart(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("D=2 y=3 k=2 expected 14 got 13"), "{out}");

    let o = quadpart(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(
        quadpart(&["verify", "/no/such/file.json"]).status.code(),
        Some(1)
    );
    let o = quadpart(&["grid", "--D", "4", "--max-x", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("D must be squarefree"));
    assert_eq!(quadpart(&["search"]).status.code(), Some(1));
    assert_eq!(quadpart(&["witness"]).status.code(), Some(1));
}

#[test]
fn identical_flags_give_identical_output() {
    for args in [
        &[
            "grid", "--D", "13", "--view", "ky", "--kmax", "6", "--ymax", "10", "--format", "csv",
        ][..],
        &["dm", "--m", "11", "--Dmax", "30", "--format", "json"],
        &["witness", "--Dmax", "60"],
        &["parity", "--D", "7", "--N", "30", "--format", "tex"],
    ] {
        let a = quadpart(args);
        let b = quadpart(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn scans_and_searches() {
    let o = quadpart(&["dm", "--m", "5", "--Dmax", "30"]);
    assert!(stdout(&o).contains("= {2, 3, 5}"));
    let o = quadpart(&["search", "--D", "17", "--m", "11", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["representatives"][10]["elements"][0]["text"], "14+3√17");
    let o = quadpart(&["search", "--D", "6", "--m", "6", "--explain"]);
    assert!(stdout(&o).contains("(3+√6) + (3+√6)"));
    let o = quadpart(&["parity", "--D", "3", "--N", "5"]);
    assert!(stdout(&o).contains("p_K(n) mod 2 for n = 1..5: 1,0,1,0,0"));
}
