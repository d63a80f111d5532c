use forms2mvc::frontend::ast::*;
use forms2mvc::frontend::{parse_form, parse_plsql, ParseError};

const FIXTURE: &str = include_str!("../../../fixtures/renew_grants.form");

fn count(block: &PlSqlBlock, name: &str) -> usize {
    let mut n = 0;
    walk_block(block, &mut |s| {
        if s.kind.name() == name {
            n += 1
        }
    });
    n
}

#[test]
fn minimal_form() {
    let f = parse_form("FORM F\nWINDOW W\nITEM B : BUTTON\nEND FORM\n").unwrap();
    assert_eq!(f.form_name.name, "F");
    assert_eq!(f.windows.len(), 1);
    assert_eq!(f.windows[0].items.len(), 1);
    assert_eq!(f.windows[0].items[0].widget, WidgetKind::Button);
    assert_eq!(f.triggers().count(), 0);
    assert!(f.program_units.is_empty());
}

#[test]
fn renew_grants_fixture_shape() {
    let f = parse_form(FIXTURE).unwrap();
    assert_eq!(f.windows.len(), 1);
    assert!(f.windows[0].items.len() >= 3);
    let triggers: Vec<_> = f.triggers().collect();
    assert_eq!(triggers.len(), 1);
    let t = triggers[0].1;
    assert_eq!(t.owner.name, "NEW_GRANT_BUTTON");
    assert_eq!(t.event.name, "WHEN-BUTTON-PRESSED");
    assert_eq!(t.body.declarations.len(), 6);
    assert_eq!(f.program_units.len(), 1);
    let u = &f.program_units[0];
    assert_eq!(u.kind, UnitKind::Function);
    assert_eq!(u.return_type, Some(PlsqlType::Varchar2));
}

#[test]
fn renew_grants_trigger_statements() {
    let f = parse_form(FIXTURE).unwrap();
    let body = &f.windows[0].triggers[0].body;
    let StatementKind::InnerBlock(inner) = &body.statements[0].kind else {
        panic!("first statement should be an inner block");
    };
    assert_eq!(inner.handlers.len(), 1);
    assert_eq!(inner.handlers[0].exceptions, vec![ExceptionName::Others]);
    assert_eq!(count(body, "SelectInto"), 2);
    let mut dml = Vec::new();
    walk_block(body, &mut |s| {
        if let StatementKind::Dml { kind, .. } = &s.kind {
            dml.push(*kind)
        }
    });
    assert_eq!(dml, vec![DmlKind::Update, DmlKind::Insert]);
    let top_ifs = body.statements.iter().filter(|s| s.kind.name() == "If").count();
    assert_eq!(top_ifs, 2);
    let bind_assigns = {
        let mut n = 0;
        walk_block(body, &mut |s| {
            if let StatementKind::Assign { target: AssignTarget::Bind(_), .. } = &s.kind {
                n += 1
            }
        });
        n
    };
    assert_eq!(bind_assigns, 2);
}

#[test]
fn unqualified_bind_uses_window_block() {
    let f = parse_form(FIXTURE).unwrap();
    let body = &f.windows[0].triggers[0].body;
    let StatementKind::InnerBlock(inner) = &body.statements[0].kind else { unreachable!() };
    let StatementKind::Assign { value, .. } = &inner.statements[0].kind else { unreachable!() };
    let ExprKind::Call { name, args } = &value.kind else { unreachable!() };
    assert_eq!(name.name, "normalize_company_name");
    let ExprKind::Bind(b) = &args[0].kind else { unreachable!() };
    assert_eq!(b.block.name, "RENEW_COMPANY_GRANTS");
    assert_eq!(b.item.name, "COMPANY");
    assert!(!b.qualified);
}

#[test]
fn insert_values_reference_locals_and_binds() {
    let f = parse_form(FIXTURE).unwrap();
    let mut refs = Vec::new();
    walk_block(&f.windows[0].triggers[0].body, &mut |s| {
        if let StatementKind::Dml { kind: DmlKind::Insert, sql } = &s.kind {
            refs = sql.refs.iter().map(|r| sql.text[r.offset..r.offset + r.len].to_string()).collect();
        }
    });
    assert_eq!(
        refs,
        vec![":GRANT_CODE", "company_name", ":RENEW_COMPANY_GRANTS.YEAR", "endowment", "total"]
    );
}

#[test]
fn two_windows_one_trigger_each() {
    let src = "FORM F\nWINDOW A\nITEM B1 : BUTTON\nTRIGGER B1.WHEN-BUTTON-PRESSED\nBEGIN x := 1; END;\nEND TRIGGER\n\
               WINDOW C\nITEM B2 : BUTTON\nTRIGGER B2.WHEN-BUTTON-PRESSED\nBEGIN y := 2; END;\nEND TRIGGER\nEND FORM\n";
    let f = parse_form(src).unwrap();
    assert_eq!(f.windows.len(), 2);
    assert_eq!(f.triggers().count(), 2);
}

#[test]
fn simple_assignment() {
    let b = parse_plsql("BEGIN x := 1; END;").unwrap();
    assert_eq!(b.statements.len(), 1);
    let StatementKind::Assign { target, value } = &b.statements[0].kind else { panic!() };
    assert!(matches!(target, AssignTarget::Var(v) if v.name == "x"));
    assert_eq!(value.kind, ExprKind::Literal(Literal::Number("1".into())));
}

#[test]
fn select_into_two_columns() {
    let src = "SELECT threshold, endowment INTO threshold, endowment FROM T;";
    let b = parse_plsql(src).unwrap();
    let StatementKind::SelectInto { columns, into, tail } = &b.statements[0].kind else { panic!() };
    assert_eq!(columns.len(), 2);
    assert_eq!(into.len(), 2);
    assert_eq!(columns[0].text, "threshold");
    assert_eq!(tail.text, "FROM T");
    assert!(columns[0].refs.is_empty());
}

#[test]
fn sql_text_is_byte_exact() {
    let src = "UPDATE  t SET a = 'x'  WHERE  b = 1 ;";
    let b = parse_plsql(src).unwrap();
    let StatementKind::Dml { sql, .. } = &b.statements[0].kind else { panic!() };
    assert_eq!(sql.text, "UPDATE  t SET a = 'x'  WHERE  b = 1");
    assert_eq!(sql.span.slice(src), sql.text);
}

#[test]
fn set_clause_lhs_is_not_a_reference() {
    let b = parse_plsql("UPDATE t SET a = v, b = w WHERE c = :B.I;").unwrap();
    let StatementKind::Dml { sql, .. } = &b.statements[0].kind else { panic!() };
    let names: Vec<_> = sql.refs.iter().map(|r| &sql.text[r.offset..r.offset + r.len]).collect();
    assert_eq!(names, vec!["v", "w", "c", ":B.I"]);
}

#[test]
fn precedence_and_is_null() {
    let b = parse_plsql("x := a + b * c; IF y IS NOT NULL AND NOT z THEN x := 1; END IF;").unwrap();
    let StatementKind::Assign { value, .. } = &b.statements[0].kind else { panic!() };
    let ExprKind::Binary { op: BinOp::Add, rhs, .. } = &value.kind else { panic!() };
    assert!(matches!(rhs.kind, ExprKind::Binary { op: BinOp::Mul, .. }));
    let StatementKind::If { branches, .. } = &b.statements[1].kind else { panic!() };
    let ExprKind::Binary { op: BinOp::And, lhs, rhs } = &branches[0].cond.kind else { panic!() };
    assert!(matches!(lhs.kind, ExprKind::Binary { op: BinOp::Ne, .. }));
    assert!(matches!(rhs.kind, ExprKind::Unary { op: UnOp::Not, .. }));
}

#[test]
fn control_flow_statements() {
    let src = "FOR i IN 1..10 LOOP EXIT WHEN i > 5; END LOOP;\n\
               WHILE n < 3 LOOP n := n + 1; END LOOP;\n\
               LOOP EXIT; END LOOP;\n\
               CASE k WHEN 1 THEN a := 1; WHEN 2 THEN a := 2; ELSE a := 3; END CASE;\n\
               COMMIT;";
    let b = parse_plsql(src).unwrap();
    let names: Vec<_> = b.statements.iter().map(|s| s.kind.name()).collect();
    assert_eq!(names, vec!["For", "While", "BasicLoop", "Case", "Call"]);
}

#[test]
fn errors_carry_positions() {
    let e = parse_plsql("BEGIN\n  x := ;\nEND;").unwrap_err();
    assert!(matches!(e, ParseError::Syntax { line: 2, col: 8, .. }), "{e}");
    assert!(e.to_string().contains("expected expression"));
}

#[test]
fn unsupported_constructs_are_named() {
    for (src, what) in [
        ("NULL;", "NULL statement"),
        ("OPEN c;", "cursor OPEN"),
        ("GOTO l;", "GOTO"),
        ("SELECT a FROM t;", "SELECT without INTO"),
        ("RAISE;", "re-raise"),
        ("x := y%ROWCOUNT;", "attribute"),
    ] {
        match parse_plsql(src) {
            Err(ParseError::Unsupported { construct, .. }) => assert!(construct.contains(what), "{src}: {construct}"),
            other => panic!("{src}: {other:?}"),
        }
    }
}

#[test]
fn select_arity_mismatch_is_an_error() {
    assert!(parse_plsql("SELECT a, b INTO x FROM t;").is_err());
}

#[test]
fn duplicate_names_are_rejected() {
    let dup_item = "FORM F\nWINDOW W\nITEM A : TEXT\nITEM a : TEXT\nEND FORM\n";
    assert!(matches!(parse_form(dup_item), Err(ParseError::Duplicate { what: "item", .. })));
    let dup_window = "FORM F\nWINDOW W\nWINDOW W\nEND FORM\n";
    assert!(matches!(parse_form(dup_window), Err(ParseError::Duplicate { what: "window", .. })));
    let dup_var = "DECLARE x NUMBER; x NUMBER; BEGIN x := 1; END;";
    assert!(matches!(parse_plsql(dup_var), Err(ParseError::Duplicate { what: "variable", .. })));
}

#[test]
fn trigger_on_unknown_item_is_rejected() {
    let src = "FORM F\nWINDOW W\nITEM A : TEXT\nTRIGGER B.WHEN-BUTTON-PRESSED\nBEGIN x := 1; END;\nEND TRIGGER\nEND FORM\n";
    assert!(matches!(parse_form(src), Err(ParseError::UnknownItem { line: 4, .. })));
}

#[test]
fn bind_to_unknown_item_is_rejected() {
    let src = "FORM F\nWINDOW W\nITEM A : BUTTON\nTRIGGER A.WHEN-BUTTON-PRESSED\nBEGIN :W.NOPE := 1; END;\nEND TRIGGER\nEND FORM\n";
    assert!(matches!(parse_form(src), Err(ParseError::UnknownItem { .. })));
    let src = "FORM F\nWINDOW W\nITEM A : BUTTON\nTRIGGER A.WHEN-BUTTON-PRESSED\nBEGIN :X.A := 1; END;\nEND TRIGGER\nEND FORM\n";
    assert!(matches!(parse_form(src), Err(ParseError::UnknownWindow { .. })));
}

#[test]
fn data_block_trigger_and_items_after_triggers() {
    let src = "FORM F\nWINDOW W BLOCK BLK\nTRIGGER BLK.POST-QUERY\nBEGIN x := 1; END;\nEND TRIGGER\n\
               TRIGGER A.WHEN-BUTTON-PRESSED\nEND TRIGGER\nITEM A : BUTTON\nEND FORM\n";
    let f = parse_form(src).unwrap();
    let w = &f.windows[0];
    assert_eq!(w.triggers[0].owner_kind, TriggerOwner::DataBlock);
    assert_eq!(w.triggers[1].owner_kind, TriggerOwner::Item);
    assert!(w.triggers[1].is_empty());
}

#[test]
fn spans_point_into_descriptor() {
    let f = parse_form(FIXTURE).unwrap();
    let t = &f.windows[0].triggers[0];
    assert!(t.span.slice(FIXTURE).starts_with("TRIGGER NEW_GRANT_BUTTON"));
    let last = t.body.statements.last().unwrap();
    assert!(last.span.slice(FIXTURE).starts_with("IF diference > 0 THEN"));
    assert!(last.span.slice(FIXTURE).ends_with("END IF;"));
    let u = &f.program_units[0];
    assert!(u.span.slice(FIXTURE).starts_with("FUNCTION normalize_company_name"));
    assert_eq!((u.name.span.line, u.name.span.col), (52, 10));
}

#[test]
fn comments_and_missing_sentinels() {
    let src = "# c\nFORM F\n# another\nWINDOW W\nITEM A : BUTTON\nTRIGGER A.WHEN-BUTTON-PRESSED\nBEGIN -- note\n x := 1; END;\nEND FORM\n";
    let e = parse_form(src).unwrap_err();
    assert!(e.to_string().contains("END TRIGGER"), "{e}");
}
