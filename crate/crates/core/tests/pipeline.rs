mod common;

use forms2mvc::kdm::CodeModel;
use forms2mvc::oo::OOModel;
use forms2mvc::pipeline::*;
use forms2mvc::platform::TargetPlatformModel;
use forms2mvc::primitives::PrimitivesRoot;

fn bytes(out: &FormOutput) -> Vec<(String, String)> {
    let mut v: Vec<_> = out
        .java
        .files
        .iter()
        .chain(&out.support.files)
        .map(|f| (f.path.clone(), f.content.clone()))
        .collect();
    v.push(("kdm".into(), out.kdm.to_json()));
    v.push(("primitives".into(), out.primitives.to_json()));
    v.push(("platform".into(), out.platform.to_json()));
    v.push(("oo".into(), out.oo.to_json()));
    v.push(("metrics".into(), out.metrics.to_json()));
    v
}

fn java(out: &FormOutput) -> Vec<(String, String)> {
    bytes(out).into_iter().filter(|(p, _)| p.ends_with(".java")).collect()
}

fn check_resume(text: &str, file: &str) {
    let opts = PipelineOptions::default();
    let first = run(text, file, &opts).unwrap();
    assert_eq!(bytes(&first), bytes(&run(text, file, &opts).unwrap()));
    let kdm = CodeModel::from_json(&first.kdm.to_json()).unwrap();
    let primitives = PrimitivesRoot::from_json(&first.primitives.to_json()).unwrap();
    let platform = TargetPlatformModel::from_json(&first.platform.to_json()).unwrap();
    let oo = OOModel::from_json(&first.oo.to_json()).unwrap();
    let starts = [
        (None, None, None),
        (Some(primitives.clone()), None, None),
        (Some(primitives.clone()), Some(platform.clone()), None),
        (Some(primitives), Some(platform), Some(oo)),
    ];
    for (i, (primitives, platform, oo)) in starts.into_iter().enumerate() {
        let models = Models { kdm: kdm.clone(), primitives, platform, oo };
        let resumed = complete(models, &opts).unwrap();
        assert_eq!(java(&resumed), java(&first), "{file}: resume point {i}");
        assert_eq!(resumed.metrics, first.metrics, "{file}: resume point {i}");
    }
}

#[test]
fn fixture_is_deterministic_and_resumable() {
    check_resume(common::FIXTURE, "renew_grants.form");
}

#[test]
fn random_forms_are_deterministic_and_resumable() {
    for (file, text) in common::corpus(20) {
        check_resume(&text, &file);
    }
}

#[test]
fn parse_errors_are_reported_not_raised() {
    let Err(d) = run("FORM F\nWINDOW W\nEND", "bad.form", &PipelineOptions::default()) else { panic!() };
    assert_eq!(d.len(), 1);
    assert!(d[0].is_error());
    assert!(d[0].to_string().starts_with("bad.form:"));
}

#[test]
fn config_files() {
    let b = parse_builtins("# comment\nlength StringUtils.length\nsubstr TODO\n", "b.txt").unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b["LENGTH"], "StringUtils.length");
    assert!(parse_builtins("length\n", "b.txt").is_err());
    let t = parse_type_map("number java.math.BigDecimal\n", "t.txt").unwrap();
    assert_eq!(t["NUMBER"], "java.math.BigDecimal");
    let e = parse_type_map("CLOB String\n", "t.txt").unwrap_err();
    assert_eq!(e.code, "X002");
}
