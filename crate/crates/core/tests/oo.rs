mod common;

use std::collections::BTreeSet;

use forms2mvc::oo::*;
use forms2mvc::pipeline::{run, FormOutput, PipelineOptions};
use forms2mvc::primitives::{Primitive, PrimitiveKind, VarId};
use proptest::prelude::*;

fn fixture() -> FormOutput {
    run(common::FIXTURE, "renew_grants.form", &PipelineOptions::default()).unwrap()
}

fn write(v: u32) -> Primitive {
    Primitive {
        kind: PrimitiveKind::WriteTo {
            var: VarId(v),
            inputs: Vec::new(),
        },
        kdm_ref: Vec::new(),
    }
}

fn modify() -> Primitive {
    Primitive {
        kind: PrimitiveKind::ModifyUI {
            builtin: "SET_ITEM_PROPERTY".into(),
            args: Vec::new(),
        },
        kdm_ref: Vec::new(),
    }
}

fn shape(sep: &Separation) -> Vec<String> {
    sep.bean
        .iter()
        .map(|b| match b {
            BeanItem::ServiceCall(n) => format!("call{n}"),
            BeanItem::Ui(p) => p.kind.name().to_string(),
        })
        .collect()
}

#[test]
fn separation_write_modify_write() {
    let sep = separate_event_handler(&[write(0), modify(), write(1)]);
    assert_eq!(sep.services.len(), 2);
    assert_eq!(shape(&sep), ["call1", "ModifyUI", "call2"]);
    assert_eq!(sep.services[0], vec![write(0)]);
    assert_eq!(sep.services[1], vec![write(1)]);
}

#[test]
fn separation_only_modify() {
    let sep = separate_event_handler(&[modify(), modify()]);
    assert!(sep.services.is_empty());
    assert_eq!(shape(&sep), ["ModifyUI", "ModifyUI"]);
}

#[test]
fn separation_without_modify() {
    let sep = separate_event_handler(&[write(0), write(1), write(2)]);
    assert_eq!(sep.services.len(), 1);
    assert_eq!(shape(&sep), ["call1"]);
}

#[test]
fn separation_leading_and_adjacent_modify() {
    let sep = separate_event_handler(&[modify(), write(0), modify(), modify(), write(1), modify()]);
    assert_eq!(shape(&sep), ["ModifyUI", "call1", "ModifyUI", "ModifyUI", "call2", "ModifyUI"]);
    assert_eq!(sep.services.len(), 2);
}

#[test]
fn nested_modify_moves_the_enclosing_statement() {
    let loop_ = Primitive {
        kind: PrimitiveKind::Loop {
            kind: forms2mvc::primitives::LoopKind::Basic,
            condition: None,
            body: vec![write(0), modify()],
        },
        kdm_ref: Vec::new(),
    };
    let sep = separate_event_handler(&[write(1), loop_]);
    assert_eq!(shape(&sep), ["call1", "Loop"]);
}

fn names(out: &FormOutput, code: &str, vars: &BTreeSet<String>) -> BTreeSet<String> {
    let code = out.primitives.code(code).unwrap();
    code.local_variables
        .iter()
        .filter(|v| vars.contains(&v.id.to_string()))
        .map(|v| v.name.clone())
        .collect()
}

#[test]
fn fixture_shared_variables() {
    let out = fixture();
    let r = platform_to_oo(&out.platform, &out.primitives);
    let shared = detect_shared_variables(&r.accesses);
    let handler = out.platform.event_handlers().next().unwrap();
    let got = names(&out, &handler.code, &shared);
    let want: BTreeSet<String> = ["money_paid", "threshold", "endowment"].map(String::from).into();
    assert_eq!(got, want);
}

fn method<'a>(out: &'a FormOutput, class: &str, name: &str) -> &'a Method {
    out.oo.class(class).unwrap().method(name).unwrap()
}

fn declared(m: &Method) -> Vec<String> {
    let mut out = Vec::new();
    m.body.visit(&mut |s| {
        if let Stmt::VariableDeclaration { name, .. } = s {
            out.push(name.clone());
        }
    });
    out
}

#[test]
fn fixture_service_locals() {
    let out = fixture();
    let p1 = method(&out, "RenewGrantsService", "newGrantButtonWhenButtonPressed1");
    let p2 = method(&out, "RenewGrantsService", "newGrantButtonWhenButtonPressed2");
    assert_eq!(declared(p1), ["companyName", "total"]);
    assert_eq!(declared(p2), ["diference"]);
    let bean = method(&out, "RenewGrantsManagedBean", "newGrantButtonWhenButtonPressed");
    assert_eq!(declared(bean), ["map"]);
}

#[test]
fn fixture_model_shape() {
    let out = fixture();
    let classes: Vec<_> = out.oo.classes.iter().map(|c| (c.name.as_str(), c.kind)).collect();
    assert!(classes.contains(&("RenewGrantsManagedBean", ClassKind::ManagedBean)));
    assert!(classes.contains(&("RenewGrantsService", ClassKind::ControllerService)));
    assert!(classes.contains(&("RenewGrantsAppService", ClassKind::AppService)));
    let app = out.oo.class("RenewGrantsAppService").unwrap();
    let helper = app.method("normalizeCompanyName").unwrap();
    assert_eq!(helper.role, MethodRole::Helper);
    assert_eq!(helper.return_type, "String");
    assert_eq!(helper.params[0].ty, MAP_TYPE);
    assert_eq!(out.oo.exceptions, ["FormTriggerFailure"]);
    let service = out.oo.class("RenewGrantsService").unwrap();
    assert!(service.method("readFromDB").is_some());
    assert!(service.method("writeToDB").is_some());
}

#[test]
fn platform_refs_are_filled() {
    let out = fixture();
    for s in &out.platform.services {
        for m in &s.methods {
            let r = m.method().expect("method ref");
            assert!(out.oo.class(&r.class).unwrap().method(&r.method).is_some());
        }
    }
    for h in out.platform.event_handlers() {
        assert!(h.method.is_some());
    }
}

fn trigger_form(body: &str) -> String {
    format!("FORM F\nWINDOW W BLOCK B\nITEM A : TEXT\nITEM GO : BUTTON\nTRIGGER GO.WHEN-BUTTON-PRESSED\n{body}\nEND TRIGGER\nEND FORM\n")
}

#[test]
fn uninitialized_read_gets_null_and_warning() {
    let src = trigger_form("DECLARE x NUMBER; y NUMBER; BEGIN y := x + 1; x := y; END;");
    let out = run(&src, "f.form", &PipelineOptions::default()).unwrap();
    let m = method(&out, "WService", "goWhenButtonPressed1");
    let decl = m.body.stmts.iter().find_map(|s| match s {
        Stmt::VariableDeclaration { name, init, comment, .. } if name == "x" => Some((init.clone(), comment.clone())),
        _ => None,
    });
    let (init, comment) = decl.expect("x declared at method level");
    assert_eq!(init, Some(OExpr::Literal("null".into())));
    assert_eq!(comment.as_deref(), Some(UNINITIALIZED_COMMENT));
    let warnings: Vec<_> = out.diagnostics.iter().filter(|d| d.code == "O002").collect();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].message.contains("`x`"));
}

#[test]
fn declaration_goes_to_innermost_common_block() {
    let src = trigger_form(
        "DECLARE x NUMBER; y NUMBER; BEGIN IF :A > 0 THEN x := 1; y := x; ELSE x := 2; END IF; :A := 1; END;",
    );
    let out = run(&src, "f.form", &PipelineOptions::default()).unwrap();
    let m = method(&out, "WService", "goWhenButtonPressed1");
    let top: Vec<_> = m
        .body
        .stmts
        .iter()
        .filter_map(|s| match s {
            Stmt::VariableDeclaration { name, .. } => Some(name.as_str()),
            _ => None,
        })
        .collect();
    assert_eq!(top, ["x"]);
    let Some(Stmt::If { then, .. }) = m.body.stmts.iter().find(|s| matches!(s, Stmt::If { .. })) else {
        panic!("no if")
    };
    assert!(matches!(&then.stmts[1], Stmt::VariableDeclaration { name, init: Some(_), .. } if name == "y"));
}

#[test]
fn modify_only_trigger_has_no_service_method() {
    let src = trigger_form("BEGIN SET_ITEM_PROPERTY('B.A', visible, property_true); GO_ITEM('B.A'); END;");
    let out = run(&src, "f.form", &PipelineOptions::default()).unwrap();
    let controller = out.platform.services.iter().find(|s| s.bean.is_some()).unwrap();
    assert!(controller.methods.is_empty());
    let bean = method(&out, "WManagedBean", "goWhenButtonPressed");
    assert_eq!(bean.body.stmts.len(), 2);
    assert!(!declared(bean).contains(&"map".to_string()));
}

#[test]
fn builtin_mapping_and_type_map() {
    let mut opts = PipelineOptions::default();
    opts.oo.builtins.insert("LENGTH".into(), "StringUtils.length".into());
    opts.oo.type_map.insert("NUMBER".into(), "java.math.BigDecimal".into());
    let out = run(common::FIXTURE, "renew_grants.form", &opts).unwrap();
    let app = &out.java.get("RenewGrantsAppService.java").unwrap().content;
    assert!(app.contains("StringUtils.length((String)map.get(\"companyName\")) > 256"));
    assert!(app.contains("substr((String)map.get(\"companyName\"), 1, 256)/* TODO: PL/SQL Library Call */"));
    let service = &out.java.get("RenewGrantsService.java").unwrap().content;
    assert!(service.contains("java.math.BigDecimal total ="));
}

/// Block tree from parent choices, depth ≤ 6; block 0 is the root.
fn tree(choices: &[u32]) -> (BlockTree, Vec<Option<u32>>, Vec<usize>) {
    let mut t = BlockTree::new();
    let mut parents = vec![None];
    let mut depth = vec![0usize];
    t.add(0, None);
    for (i, c) in choices.iter().enumerate() {
        let id = i as u32 + 1;
        let candidates: Vec<u32> = (0..id).filter(|&j| depth[j as usize] < 6).collect();
        let p = candidates[*c as usize % candidates.len()];
        t.add(id, Some(p));
        parents.push(Some(p));
        depth.push(depth[p as usize] + 1);
    }
    (t, parents, depth)
}

/// Deepest block that is an ancestor-or-self of every accessed block.
fn oracle(parents: &[Option<u32>], depth: &[usize], blocks: &[u32]) -> u32 {
    let ancestors = |b: u32| {
        let mut out = vec![b];
        let mut cur = parents[b as usize];
        while let Some(p) = cur {
            out.push(p);
            cur = parents[p as usize];
        }
        out
    };
    let sets: Vec<Vec<u32>> = blocks.iter().map(|&b| ancestors(b)).collect();
    (0..parents.len() as u32)
        .filter(|c| sets.iter().all(|s| s.contains(c)))
        .max_by_key(|&c| depth[c as usize])
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn placement_matches_lca_oracle(
        choices in proptest::collection::vec(any::<u32>(), 0..30),
        picks in proptest::collection::vec((any::<u32>(), any::<bool>()), 1..=8),
    ) {
        let (t, parents, depth) = tree(&choices);
        let n = parents.len() as u32;
        let accesses: Vec<VariableAccess> = picks
            .iter()
            .map(|(b, read)| VariableAccess {
                variable: "x".into(),
                kind: if *read { AccessKind::Read } else { AccessKind::Write },
                method: "m".into(),
                block: Some(b % n),
                path: Vec::new(),
            })
            .collect();
        let blocks: Vec<u32> = accesses.iter().map(|a| a.block.unwrap()).collect();
        let p = place_variable_declaration(&accesses, &t);
        prop_assert_eq!(p.block, oracle(&parents, &depth, &blocks));
        prop_assert_eq!(p.warn, picks[0].1);
    }
}
