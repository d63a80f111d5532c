mod common;

use forms2mvc::codegen::*;
use forms2mvc::oo::{OExpr, Stmt};
use forms2mvc::pipeline::{run, FormOutput, PipelineOptions};

fn fixture() -> FormOutput {
    run(common::FIXTURE, "renew_grants.form", &PipelineOptions::default()).unwrap()
}

#[test]
fn one_file_per_class_plus_support() {
    let out = fixture();
    let paths: Vec<_> = out.java.files.iter().map(|f| f.path.as_str()).collect();
    assert_eq!(
        paths,
        ["RenewGrantsAppService.java", "RenewGrantsManagedBean.java", "RenewGrantsService.java"]
    );
    let support: Vec<_> = out.support.files.iter().map(|f| f.path.as_str()).collect();
    assert_eq!(support, ["FormTriggerFailure.java", "PlsqlLibrary.java"]);
}

#[test]
fn headers_and_imports() {
    let out = fixture();
    let service = &out.java.get("RenewGrantsService.java").unwrap().content;
    let mut lines = service.lines();
    assert_eq!(lines.next(), Some("// Generated by forms2mvc from renew_grants.form (lines 3-50)"));
    assert_eq!(lines.next(), Some("package renew_grants;"));
    assert!(service.contains("import java.util.Map;\n"));
    assert!(service.contains("import static renew_grants.PlsqlLibrary.*;\n"));
    assert!(service.contains("@Service\npublic class RenewGrantsService {"));
    let bean = &out.java.get("RenewGrantsManagedBean.java").unwrap().content;
    assert!(bean.contains("import java.util.HashMap;\n"));
    assert!(!bean.contains("import static"));
}

#[test]
fn todo_annotations_follow_unmapped_calls() {
    let out = fixture();
    let all: String = out.java.files.iter().map(|f| f.content.as_str()).collect();
    assert_eq!(all.matches(TODO_ANNOTATION).count(), 3);
    assert!(all.contains("message(\"Database unaccesible\")/* TODO: PL/SQL Library Call */;"));
    assert!(all.contains("throw new FormTriggerFailure();"));
    let lib = &out.support.get("PlsqlLibrary.java").unwrap().content;
    for stub in ["length", "substr", "message"] {
        assert!(lib.contains(&format!("public static Object {stub}(Object... args)")), "{stub}");
    }
}

#[test]
fn expression_rendering() {
    let two = OExpr::Literal("2".into());
    let x = OExpr::name("x");
    let sum = OExpr::Binary { op: "+".into(), lhs: Box::new(two.clone()), rhs: Box::new(x.clone()) };
    assert_eq!(render_expr(&sum), "(2 + x)");
    let cmp = OExpr::Binary { op: ">".into(), lhs: Box::new(x.clone()), rhs: Box::new(two) };
    assert_eq!(render_expr(&cmp), "x > 2");
    assert_eq!(render_expr(&OExpr::map_get("k", Some("Double"))), "(Double)map.get(\"k\")");
    assert_eq!(render_expr(&OExpr::string("a\"b")), "\"a\\\"b\"");
}

#[test]
fn block_rendering_collapses_else_if() {
    let mut inner = forms2mvc::oo::Block::new(3);
    inner.stmts.push(Stmt::Break);
    let nested = Stmt::If { cond: OExpr::name("b"), then: inner, otherwise: None };
    let mut otherwise = forms2mvc::oo::Block::new(2);
    otherwise.stmts.push(nested);
    let mut top = forms2mvc::oo::Block::new(0);
    top.stmts.push(Stmt::If { cond: OExpr::name("a"), then: forms2mvc::oo::Block::new(1), otherwise: Some(otherwise) });
    assert_eq!(render_block(&top, 0), "if (a) {\n} else if (b) {\n  break;\n}\n");
}

fn skeleton(body: &str) -> SkeletonFile {
    SkeletonFile {
        path: "views/RenewGrantsManagedBean.java".into(),
        content: format!("public class RenewGrantsManagedBean {{\n  public void newGrantButtonWhenButtonPressed() {{\n{body}  }}\n}}\n"),
    }
}

#[test]
fn skeleton_merge_splices_body() {
    let out = fixture();
    let g = merge_into_skeleton(&out.java, &[skeleton("    // BODY:newGrantButtonWhenButtonPressed\n")]);
    assert!(g.diagnostics.is_empty(), "{:?}", g.diagnostics);
    let merged = &g.files.get("RenewGrantsManagedBean.java").unwrap().content;
    assert!(merged.contains("  public void newGrantButtonWhenButtonPressed() {\n    Map<String, Object> map = new HashMap<String, Object>();\n"));
    assert!(merged.contains("    renewGrantsService.newGrantButtonWhenButtonPressed2(map);\n"));
    assert!(!merged.contains(MARKER_PREFIX));
    assert_eq!(g.files.files.len(), 3);
}

#[test]
fn skeleton_diagnostics() {
    let out = fixture();
    let missing = merge_into_skeleton(&out.java, &[skeleton("")]);
    assert!(missing.diagnostics.iter().any(|d| d.code == "J002" && d.is_error()));
    let unused = merge_into_skeleton(
        &out.java,
        &[skeleton("    // BODY:newGrantButtonWhenButtonPressed\n    // BODY:somethingElse\n")],
    );
    assert_eq!(unused.diagnostics.len(), 1);
    assert_eq!(unused.diagnostics[0].code, "J003");
    assert!(!unused.diagnostics[0].is_error());
    assert!(unused.files.get("RenewGrantsManagedBean.java").unwrap().content.contains("// BODY:somethingElse"));
    let dup = merge_into_skeleton(
        &out.java,
        &[skeleton("    // BODY:newGrantButtonWhenButtonPressed\n    // BODY:newGrantButtonWhenButtonPressed\n")],
    );
    assert!(dup.diagnostics.iter().any(|d| d.code == "J004" && d.is_error()));
}

#[test]
fn missing_platform_reference_is_an_error() {
    let out = fixture();
    let mut platform = out.platform.clone();
    platform.managed_beans[0].event_handlers[0].method = None;
    let g = generate(&out.oo, &platform);
    assert!(g.diagnostics.iter().any(|d| d.code == "J001"));
}

#[test]
fn unresolved_name_skips_the_class() {
    let out = fixture();
    let mut oo = out.oo.clone();
    let service = oo.classes.iter_mut().find(|c| c.name == "RenewGrantsService").unwrap();
    service.methods[0].body.stmts.push(Stmt::expr(OExpr::name("nowhere")));
    let g = generate(&oo, &out.platform);
    assert!(g.diagnostics.iter().any(|d| d.code == "J001" && d.message.contains("nowhere")));
    assert!(g.files.get("RenewGrantsService.java").is_none());
}
