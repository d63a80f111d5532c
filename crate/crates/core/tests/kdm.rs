use forms2mvc::frontend::ast::{walk_block, StatementKind};
use forms2mvc::frontend::{parse_form, parse_plsql_with, ParseOptions};
use forms2mvc::kdm::*;

const FIXTURE: &str = include_str!("../../../fixtures/renew_grants.form");

fn fixture() -> (forms2mvc::frontend::ast::FormBundle, Injection) {
    let form = parse_form(FIXTURE).unwrap();
    let inj = inject(&form, FIXTURE, "renew_grants.form");
    (form, inj)
}

fn stereotypes_below(model: &CodeModel, id: ElementId) -> Vec<Stereotype> {
    let mut out = Vec::new();
    model.walk(id, &mut |e| {
        if let Element::ActionElement(a) = e {
            out.push(a.name)
        }
    });
    out
}

#[test]
fn trigger_injection_structure() {
    let (_, inj) = fixture();
    let m = &inj.model;
    assert!(inj.diagnostics.is_empty(), "{:?}", inj.diagnostics);
    let trigger = m.callables().find(|c| c.origin == Origin::Trigger).unwrap();
    let Element::BlockUnit(body) = m.element(trigger.body) else { panic!("body is a BlockUnit") };
    assert!(body.source_ref.snippet.starts_with("DECLARE"));
    assert_eq!(body.storable_units.len(), 6);
    let Element::TryUnit(t) = m.element(body.children[0]) else { panic!("first child is a TryUnit") };
    let catch = *t.children.last().unwrap();
    let Element::CatchUnit(c) = m.element(catch) else { panic!("TryUnit ends with a CatchUnit") };
    assert_eq!(c.exceptions, vec!["OTHERS"]);
    let st = stereotypes_below(m, trigger.body);
    for s in [Stereotype::Assign, Stereotype::Select, Stereotype::If, Stereotype::Call, Stereotype::Throw] {
        assert!(st.contains(&s), "missing {s:?}");
    }
    let ui = m.ui_resource(trigger.ui_resource.unwrap()).unwrap();
    assert_eq!(ui.name, "NEW_GRANT_BUTTON");
}

#[test]
fn program_unit_injection() {
    let (_, inj) = fixture();
    let m = &inj.model;
    let unit = m.callables().find(|c| c.origin == Origin::ProgramUnit).unwrap();
    assert_eq!(unit.name, "normalize_company_name");
    assert!(unit.ui_resource.is_none());
    assert!(unit.stereotypes.contains(&"CodeFragment".to_string()));
    let st = stereotypes_below(m, unit.body);
    assert_eq!(st.iter().filter(|s| **s == Stereotype::If).count(), 1);
    assert_eq!(st.iter().filter(|s| **s == Stereotype::Return).count(), 2);
    assert_eq!(unit.params.len(), 1);
}

#[test]
fn call_to_program_unit_is_resolved() {
    let (_, inj) = fixture();
    let m = &inj.model;
    let unit_id = m.callables().find(|c| c.origin == Origin::ProgramUnit).unwrap().id;
    let assign = m
        .elements
        .iter()
        .find_map(|e| match e {
            Element::ActionElement(a) if a.source_ref.snippet.starts_with("company_name :=") => Some(a),
            _ => None,
        })
        .unwrap();
    assert_eq!(assign.calls, vec![Callee::Unit(unit_id)]);
    assert_eq!(assign.reads.len(), 1);
    assert!(m.ui_resource(assign.reads[0]).is_some());
    let message = m
        .elements
        .iter()
        .find_map(|e| match e {
            Element::ActionElement(a) if a.name == Stereotype::Call => Some(a),
            _ => None,
        })
        .unwrap();
    assert_eq!(message.calls, vec![Callee::Builtin("message".into())]);
}

#[test]
fn forms_constants_are_not_variables() {
    let (_, inj) = fixture();
    assert!(inj.model.globals.is_empty());
}

#[test]
fn empty_trigger_has_empty_block() {
    let src = "FORM F\nWINDOW W\nITEM B : BUTTON\nTRIGGER B.WHEN-BUTTON-PRESSED\nEND TRIGGER\nEND FORM\n";
    let form = parse_form(src).unwrap();
    let inj = inject(&form, src, "f");
    let t = inj.model.callables().next().unwrap();
    assert!(inj.model.element(t.body).children().is_empty());
    assert!(validate_code_model(&inj.model).is_empty());
}

#[test]
fn fixture_model_is_well_formed() {
    let (_, inj) = fixture();
    assert_eq!(validate_code_model(&inj.model), vec![]);
}

#[test]
fn dangling_read_is_reported() {
    let (_, mut inj) = fixture();
    let bogus = ElementId(inj.model.elements.len() as u32 + 10);
    let a = inj
        .model
        .elements
        .iter_mut()
        .find_map(|e| match e {
            Element::ActionElement(a) if a.name == Stereotype::Assign => Some(a),
            _ => None,
        })
        .unwrap();
    a.reads.push(bogus);
    let diags = validate_code_model(&inj.model);
    assert_eq!(diags.len(), 1, "{diags:?}");
    assert!(diags[0].message.contains("unresolved reference"));
}

#[test]
fn program_unit_with_ui_resource_is_reported() {
    let (_, mut inj) = fixture();
    let ui = inj.model.elements.iter().find_map(|e| match e {
        Element::UiResource(u) => Some(u.id),
        _ => None,
    });
    for e in &mut inj.model.elements {
        if let Element::CallableUnit(c) = e {
            if c.origin == Origin::ProgramUnit {
                c.ui_resource = ui;
            }
        }
    }
    assert_eq!(validate_code_model(&inj.model).len(), 1);
}

#[test]
fn count_preservation() {
    let (form, inj) = fixture();
    let m = &inj.model;
    let triggers = m.callables().filter(|c| c.origin == Origin::Trigger).count();
    let units = m.callables().filter(|c| c.origin == Origin::ProgramUnit).count();
    assert_eq!(triggers, form.triggers().count());
    assert_eq!(units, form.program_units.len());
    let mut ast_sql = 0;
    for (_, t) in form.triggers() {
        walk_block(&t.body, &mut |s| {
            if matches!(s.kind, StatementKind::SelectInto { .. } | StatementKind::Dml { .. }) {
                ast_sql += 1
            }
        });
    }
    let kdm_sql: usize = Stereotype::ALL.iter().filter(|s| s.is_sql()).map(|s| m.count_stereotype(*s)).sum();
    assert_eq!(kdm_sql, ast_sql);
    assert_eq!(kdm_sql, 4);
}

#[test]
fn snippets_reparse_to_the_same_kind() {
    let (_, inj) = fixture();
    let opts = ParseOptions {
        default_block: Some("RENEW_COMPANY_GRANTS".into()),
    };
    for e in &inj.model.elements {
        let Element::ActionElement(a) = e else { continue };
        if a.name.is_structural() {
            continue;
        }
        let block = parse_plsql_with(&a.source_ref.snippet, &opts).unwrap();
        let kind = block.statements[0].kind.name();
        let expected = match a.name {
            Stereotype::Assign => "Assign",
            Stereotype::Select => "SelectInto",
            Stereotype::Insert | Stereotype::Update | Stereotype::Delete => "Dml",
            Stereotype::If => "If",
            Stereotype::Call => "Call",
            Stereotype::Throw => "Raise",
            Stereotype::Return => "Return",
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(kind, expected, "{}", a.source_ref.snippet);
    }
}

#[test]
fn json_round_trip() {
    let (_, inj) = fixture();
    let json = inj.model.to_json();
    assert!(json.contains("\"type\": \"UIResource\""));
    assert!(json.contains("\"id\": \"e0\""));
    let back = CodeModel::from_json(&json).unwrap();
    assert_eq!(back, inj.model);
    assert_eq!(back.to_json(), json);
}

#[test]
fn undeclared_identifier_warns() {
    let src = "FORM F\nWINDOW W\nITEM B : BUTTON\nTRIGGER B.WHEN-BUTTON-PRESSED\nBEGIN x := y + 1; END;\nEND TRIGGER\nEND FORM\n";
    let form = parse_form(src).unwrap();
    let inj = inject(&form, src, "f.form");
    assert_eq!(inj.diagnostics.len(), 2);
    assert!(inj.diagnostics.iter().all(|d| d.code == "K001" && !d.is_error()));
    assert_eq!(inj.model.globals.len(), 2);
    assert!(validate_code_model(&inj.model).is_empty());
}
