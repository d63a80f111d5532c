use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/renew_grants.form")
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forms2mvc")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tree(dir: &Path) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap().flatten() {
        let p = e.path();
        if p.is_dir() {
            out.extend(tree(&p));
        } else {
            out.push((p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn emits_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(&[
        "--input",
        s(&fixture()),
        "--out",
        s(tmp.path()),
        "--emit",
        "kdm,primitives,platform,oo,java,metrics,flowgraph",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let root = tmp.path();
    for stage in ["kdm", "primitives", "platform", "oo"] {
        let p = root.join(format!("models/RENEW_GRANTS/{stage}.json"));
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
        assert!(v.is_object(), "{stage}");
    }
    for class in ["RenewGrantsManagedBean", "RenewGrantsService", "RenewGrantsAppService"] {
        assert!(root.join(format!("src/RENEW_GRANTS/{class}.java")).exists(), "{class}");
    }
    assert!(root.join("metrics/RENEW_GRANTS.json").exists());
    let table = fs::read_to_string(root.join("metrics/RENEW_GRANTS.txt")).unwrap();
    assert!(table.contains("SQL statements"));
    let flows: Vec<_> = fs::read_dir(root.join("flowgraph")).unwrap().flatten().collect();
    assert_eq!(flows.len(), 1);
    assert!(flows.iter().all(|f| f.path().extension().unwrap() == "cypher"));
}

#[test]
fn default_emits_java_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(&["--input", s(&fixture()), "--out", s(tmp.path())]);
    assert!(out.status.success());
    assert!(tmp.path().join("src/RENEW_GRANTS").is_dir());
    assert!(!tmp.path().join("models").exists());
    assert!(!tmp.path().join("metrics").exists());
}

#[test]
fn dot_flow_format() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(&[
        "--input",
        s(&fixture()),
        "--out",
        s(tmp.path()),
        "--emit",
        "flowgraph",
        "--flow-format",
        "dot",
    ]);
    assert!(out.status.success());
    for f in fs::read_dir(tmp.path().join("flowgraph")).unwrap().flatten() {
        assert_eq!(f.path().extension().unwrap(), "dot");
        assert!(fs::read_to_string(f.path()).unwrap().starts_with("digraph "));
    }
}

#[test]
fn resume_reproduces_sources() {
    let tmp = tempfile::tempdir().unwrap();
    let full = tmp.path().join("full");
    let out = cli(&["--input", s(&fixture()), "--out", s(&full), "--emit", "kdm,primitives,platform,oo,java"]);
    assert!(out.status.success());
    let want = tree(&full.join("src"));
    for stage in ["kdm", "primitives", "platform", "oo"] {
        let dir = tmp.path().join(stage);
        let model = full.join(format!("models/RENEW_GRANTS/{stage}.json"));
        let out = cli(&["--resume", s(&model), "--out", s(&dir)]);
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(tree(&dir.join("src")), want, "{stage}");
    }
}

#[test]
fn resume_rejects_unknown_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let bogus = tmp.path().join("model.json");
    fs::write(&bogus, "{}").unwrap();
    let out = cli(&["--resume", s(&bogus), "--out", s(tmp.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("X002"));
}

#[test]
fn strict_fails_on_warnings() {
    let tmp = tempfile::tempdir().unwrap();
    let form = tmp.path().join("empty.form");
    fs::write(
        &form,
        "FORM E\nWINDOW W BLOCK B\nITEM OK : BUTTON\nITEM NOP : BUTTON\n\
TRIGGER OK.WHEN-BUTTON-PRESSED\nBEGIN COMMIT; END;\nEND TRIGGER\n\
TRIGGER NOP.WHEN-BUTTON-PRESSED\nEND TRIGGER\nEND FORM\n",
    )
    .unwrap();
    let lenient = cli(&["--input", s(&form), "--out", s(&tmp.path().join("a"))]);
    let strict = cli(&["--input", s(&form), "--out", s(&tmp.path().join("b")), "--strict"]);
    let stderr = String::from_utf8_lossy(&lenient.stderr).into_owned();
    assert!(lenient.status.success(), "{stderr}");
    assert!(stderr.contains("T002"), "{stderr}");
    assert!(!strict.status.success());
}

#[test]
fn bad_input_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let form = tmp.path().join("bad.form");
    fs::write(&form, "FORM X\nWINDOW\n").unwrap();
    let out = cli(&["--input", s(&form), "--out", s(tmp.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("F00"));
    let missing = cli(&["--input", s(&tmp.path().join("nope.form")), "--out", s(tmp.path())]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("X001"));
}
