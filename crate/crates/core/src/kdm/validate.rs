//! Well-formedness rules of the code model.

use std::collections::{BTreeMap, BTreeSet};

use super::model::*;
use crate::diagnostics::{codes, Diagnostic};

struct Checker<'a> {
    model: &'a CodeModel,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, id: ElementId, rule: &str) {
        self.out
            .push(Diagnostic::error(codes::KDM_INVARIANT, format!("{id}: {rule}")));
    }

    fn expect_kind(&mut self, from: ElementId, to: ElementId, what: &str, ok: fn(&Element) -> bool) {
        match self.model.get(to) {
            None => self.report(from, &format!("unresolved reference {to} ({what})")),
            Some(e) if !ok(e) => self.report(from, &format!("{what} {to} is a {}", e.type_name())),
            Some(_) => {}
        }
    }

    fn check_source_ref(&mut self, id: ElementId, sr: &SourceRef) {
        let valid = sr.span.start <= sr.span.end
            && sr.span.end <= self.model.source.len()
            && self.model.source.is_char_boundary(sr.span.start)
            && self.model.source.is_char_boundary(sr.span.end);
        if !valid {
            self.report(id, "source span out of range");
        } else if sr.span.slice(&self.model.source) != sr.snippet {
            self.report(id, "snippet differs from the source text at its span");
        }
    }
}

fn is_storable(e: &Element) -> bool {
    matches!(e, Element::StorableUnit(_))
}

fn is_data(e: &Element) -> bool {
    matches!(e, Element::StorableUnit(_) | Element::UiResource(_))
}

fn is_code(e: &Element) -> bool {
    matches!(
        e,
        Element::ActionElement(_) | Element::BlockUnit(_) | Element::TryUnit(_) | Element::CatchUnit(_)
    )
}

fn is_block(e: &Element) -> bool {
    matches!(e, Element::BlockUnit(_) | Element::TryUnit(_))
}

/// Returns one diagnostic per violated rule; empty means well-formed.
pub fn validate_code_model(model: &CodeModel) -> Vec<Diagnostic> {
    let mut c = Checker {
        model,
        out: Vec::new(),
    };
    for (i, e) in model.elements.iter().enumerate() {
        if e.id().index() != i {
            c.report(e.id(), &format!("id does not match position {i}"));
        }
    }
    // Each code element has at most one parent.
    let mut parent: BTreeMap<ElementId, ElementId> = BTreeMap::new();
    for e in &model.elements {
        for child in e.children() {
            if let Some(p) = parent.insert(*child, e.id()) {
                c.report(*child, &format!("element has two parents ({p} and {})", e.id()));
            }
        }
    }

    for e in &model.elements {
        let id = e.id();
        if let Some(sr) = e.source_ref() {
            c.check_source_ref(id, sr);
        }
        for child in e.children() {
            c.expect_kind(id, *child, "child", is_code);
            if let (Some(pr), Some(cr)) = (e.source_ref(), model.get(*child).and_then(|x| x.source_ref())) {
                if !pr.span.contains(&cr.span) {
                    c.report(*child, &format!("source span not inside parent {id}"));
                }
            }
        }
        match e {
            Element::CallableUnit(u) => {
                c.expect_kind(id, u.body, "body", is_block);
                if let Some(body) = model.get(u.body).and_then(|b| b.source_ref()) {
                    if !u.source_ref.span.contains(&body.span) {
                        c.report(u.body, "body span not inside its callable unit");
                    }
                }
                let data_block = u.stereotypes.iter().any(|s| s == "DataBlockTrigger");
                match u.origin {
                    Origin::Trigger => {
                        if u.ui_resource.is_none() && !data_block {
                            c.report(id, "TRIGGER callable unit without ui_resource");
                        }
                        if u.ui_resource.is_some() && data_block {
                            c.report(id, "data-block trigger with a ui_resource");
                        }
                        match u.screen {
                            Some(s) => c.expect_kind(id, s, "screen", |e| matches!(e, Element::Screen(_))),
                            None => c.report(id, "TRIGGER callable unit without screen"),
                        }
                    }
                    Origin::ProgramUnit => {
                        if u.ui_resource.is_some() {
                            c.report(id, "PROGRAM_UNIT callable unit has a ui_resource");
                        }
                        if !u.stereotypes.iter().any(|s| s == "CodeFragment") {
                            c.report(id, "PROGRAM_UNIT callable unit lacks the CodeFragment stereotype");
                        }
                    }
                }
                if let Some(r) = u.ui_resource {
                    c.expect_kind(id, r, "ui_resource", |e| matches!(e, Element::UiResource(_)));
                }
                for p in &u.params {
                    c.expect_kind(id, *p, "parameter", is_storable);
                }
            }
            Element::BlockUnit(b) | Element::TryUnit(b) => {
                let mut names = BTreeSet::new();
                for s in &b.storable_units {
                    c.expect_kind(id, *s, "storable unit", is_storable);
                    if let Some(su) = model.storable(*s) {
                        if !names.insert(su.name.to_uppercase()) {
                            c.report(*s, &format!("duplicate storable unit `{}` in block {id}", su.name));
                        }
                    }
                }
            }
            Element::ActionElement(a) => {
                for r in a.reads.iter().chain(&a.writes) {
                    c.expect_kind(id, *r, "data reference", is_data);
                }
                for callee in &a.calls {
                    if let Callee::Unit(u) = callee {
                        c.expect_kind(id, *u, "callee", |e| matches!(e, Element::CallableUnit(_)));
                    }
                }
                if a.name.is_structural() && !matches!(parent.get(&id).and_then(|p| model.action(*p)), Some(p) if matches!(p.name, Stereotype::If | Stereotype::Case)) {
                    c.report(id, "ELSIF/ELSE element outside of IF/CASE");
                }
            }
            Element::Screen(s) => {
                for r in &s.resources {
                    match model.ui_resource(*r) {
                        Some(u) if u.screen == id => {}
                        Some(_) => c.report(*r, &format!("UIResource listed by screen {id} belongs to another screen")),
                        None => c.expect_kind(id, *r, "resource", |e| matches!(e, Element::UiResource(_))),
                    }
                }
            }
            Element::UiResource(u) => match model.screen(u.screen) {
                Some(s) if s.resources.contains(&id) => {}
                Some(_) => c.report(id, "owning screen does not list this UIResource"),
                None => c.report(id, &format!("unresolved reference {} (screen)", u.screen)),
            },
            Element::CatchUnit(_) => {
                if !matches!(parent.get(&id).and_then(|p| model.get(*p)), Some(Element::TryUnit(_))) {
                    c.report(id, "CatchUnit outside of a TryUnit");
                }
            }
            Element::StorableUnit(_) => {}
        }
    }
    for r in &model.roots {
        c.expect_kind(*r, *r, "root", |e| matches!(e, Element::CallableUnit(_)));
    }
    for s in &model.screens {
        c.expect_kind(*s, *s, "screen", |e| matches!(e, Element::Screen(_)));
    }
    for g in &model.globals {
        c.expect_kind(*g, *g, "global", is_storable);
    }
    // Acyclicity: a walk from each root must never revisit an element.
    for r in &model.roots {
        if let Some(u) = model.callable(*r) {
            let mut seen = BTreeSet::new();
            let mut stack = vec![u.body];
            while let Some(x) = stack.pop() {
                if !seen.insert(x) {
                    c.report(x, "cycle in children");
                    break;
                }
                if let Some(e) = model.get(x) {
                    stack.extend(e.children().iter().copied());
                }
            }
        }
    }
    c.out
}
