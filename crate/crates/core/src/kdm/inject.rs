//! code2kdm: FormBundle to CodeModel.

use std::collections::BTreeMap;

use super::model::*;
use crate::diagnostics::{codes, Diagnostic};
use crate::frontend::ast::*;

/// Predefined Forms constants usable as plain identifiers.
pub const FORMS_CONSTANTS: &[&str] = &[
    "PROPERTY_TRUE", "PROPERTY_FALSE", "PROPERTY_ON", "PROPERTY_OFF", "VISIBLE", "ENABLED",
    "DISPLAYED", "NAVIGABLE", "UPDATEABLE", "UPDATE_ALLOWED", "INSERT_ALLOWED", "QUERYABLE",
    "REQUIRED", "VISUAL_ATTRIBUTE", "LABEL", "PROMPT_TEXT", "NO_VALIDATE", "DO_COMMIT",
    "NO_COMMIT", "FULL_ROLLBACK", "ALERT_BUTTON1", "ALERT_BUTTON2", "ALERT_BUTTON3",
];

/// Builtins that are called without parentheses.
pub const ZERO_ARG_BUILTINS: &[&str] = &["SYSDATE", "SYSTIMESTAMP", "USER", "SQLCODE", "SQLERRM", "ROWNUM"];

pub struct Injection {
    pub model: CodeModel,
    pub diagnostics: Vec<Diagnostic>,
}

struct Injector<'a> {
    form: &'a FormBundle,
    text: &'a str,
    file: String,
    elements: Vec<Element>,
    diagnostics: Vec<Diagnostic>,
    /// (window index, item key) -> UIResource.
    ui: BTreeMap<(usize, String), ElementId>,
    globals: BTreeMap<String, ElementId>,
    global_ids: Vec<ElementId>,
    scopes: Vec<BTreeMap<String, ElementId>>,
}

/// Builds the code model of `form`. `text` is the descriptor the spans index into.
pub fn inject(form: &FormBundle, text: &str, file: &str) -> Injection {
    let mut inj = Injector {
        form,
        text,
        file: file.to_string(),
        elements: Vec::new(),
        diagnostics: Vec::new(),
        ui: BTreeMap::new(),
        globals: BTreeMap::new(),
        global_ids: Vec::new(),
        scopes: Vec::new(),
    };
    let mut screens = Vec::new();
    for (wi, w) in form.windows.iter().enumerate() {
        let screen = inj.alloc(Element::Screen(Screen {
            id: ElementId(0),
            name: w.name.name.clone(),
            block: w.block_name().name.clone(),
            resources: Vec::new(),
            source_ref: inj.source_ref(w.span),
        }));
        let mut resources = Vec::new();
        for item in &w.items {
            let id = inj.alloc(Element::UiResource(UiResource {
                id: ElementId(0),
                name: item.name.name.clone(),
                widget: item.widget,
                screen,
                source_ref: inj.source_ref(item.span),
            }));
            inj.ui.insert((wi, item.name.key()), id);
            resources.push(id);
        }
        if let Element::Screen(s) = &mut inj.elements[screen.index()] {
            s.resources = resources;
        }
        screens.push(screen);
    }

    let mut roots = Vec::new();
    for (wi, w) in form.windows.iter().enumerate() {
        for t in &w.triggers {
            roots.push(inj.trigger(wi, screens[wi], t));
        }
    }
    let mut units = BTreeMap::new();
    for u in &form.program_units {
        let id = inj.program_unit(u);
        units.insert(u.name.key(), id);
        roots.push(id);
    }
    inj.resolve_calls(&units);

    Injection {
        model: CodeModel {
            form_name: form.form_name.name.clone(),
            file: inj.file,
            source: text.to_string(),
            elements: inj.elements,
            roots,
            screens,
            globals: inj.global_ids,
        },
        diagnostics: inj.diagnostics,
    }
}

fn set_id(e: &mut Element, id: ElementId) {
    match e {
        Element::CallableUnit(x) => x.id = id,
        Element::BlockUnit(x) | Element::TryUnit(x) => x.id = id,
        Element::CatchUnit(x) => x.id = id,
        Element::ActionElement(x) => x.id = id,
        Element::StorableUnit(x) => x.id = id,
        Element::Screen(x) => x.id = id,
        Element::UiResource(x) => x.id = id,
    }
}

fn dedup_push(v: &mut Vec<ElementId>, id: ElementId) {
    if !v.contains(&id) {
        v.push(id);
    }
}

#[derive(Default)]
struct Access {
    reads: Vec<ElementId>,
    writes: Vec<ElementId>,
    calls: Vec<Callee>,
}

impl<'a> Injector<'a> {
    fn alloc(&mut self, mut e: Element) -> ElementId {
        let id = ElementId(self.elements.len() as u32);
        set_id(&mut e, id);
        self.elements.push(e);
        id
    }

    fn source_ref(&self, span: Span) -> SourceRef {
        SourceRef {
            file: self.file.clone(),
            span,
            snippet: span.slice(self.text).to_string(),
        }
    }

    fn set_children(&mut self, id: ElementId, children: Vec<ElementId>) {
        match &mut self.elements[id.index()] {
            Element::BlockUnit(b) | Element::TryUnit(b) => b.children = children,
            Element::CatchUnit(c) => c.children = children,
            Element::ActionElement(a) => a.children = children,
            _ => unreachable!("element has no children"),
        }
    }

    fn trigger(&mut self, wi: usize, screen: ElementId, t: &Trigger) -> ElementId {
        let ui_resource = t.owner_item().map(|item| self.ui[&(wi, item.key())]);
        let stereotypes = match t.owner_kind {
            TriggerOwner::Item => Vec::new(),
            TriggerOwner::DataBlock => vec!["DataBlockTrigger".to_string()],
        };
        let unit = self.alloc(Element::CallableUnit(CallableUnit {
            id: ElementId(0),
            name: t.owner.name.clone(),
            origin: Origin::Trigger,
            body: ElementId(0),
            ui_resource,
            screen: Some(screen),
            event: Some(t.event.name.clone()),
            unit_kind: None,
            params: Vec::new(),
            return_type: None,
            stereotypes,
            source_ref: self.source_ref(t.span),
        }));
        self.scopes.clear();
        self.scopes.push(BTreeMap::new());
        let body = self.block(&t.body, Vec::new());
        self.scopes.clear();
        if let Element::CallableUnit(c) = &mut self.elements[unit.index()] {
            c.body = body;
        }
        unit
    }

    fn program_unit(&mut self, u: &ProgramUnit) -> ElementId {
        let unit = self.alloc(Element::CallableUnit(CallableUnit {
            id: ElementId(0),
            name: u.name.name.clone(),
            origin: Origin::ProgramUnit,
            body: ElementId(0),
            ui_resource: None,
            screen: None,
            event: None,
            unit_kind: Some(u.kind),
            params: Vec::new(),
            return_type: u.return_type,
            stereotypes: vec!["CodeFragment".to_string()],
            source_ref: self.source_ref(u.span),
        }));
        self.scopes.clear();
        let mut scope = BTreeMap::new();
        let mut params = Vec::new();
        for p in &u.params {
            let id = self.alloc(Element::StorableUnit(StorableUnit {
                id: ElementId(0),
                name: p.name.name.clone(),
                declared_type: Some(p.ty),
                scope: Scope::Local,
                role: StorableRole::Parameter,
                init: None,
                source_ref: Some(self.source_ref(p.span)),
            }));
            scope.insert(p.name.key(), id);
            params.push(id);
        }
        self.scopes.push(scope);
        let body = self.block(&u.body, params.clone());
        self.scopes.clear();
        if let Element::CallableUnit(c) = &mut self.elements[unit.index()] {
            c.body = body;
            c.params = params;
        }
        unit
    }

    /// Allocates a BlockUnit (or TryUnit when the block has handlers).
    fn block(&mut self, b: &PlSqlBlock, mut storables: Vec<ElementId>) -> ElementId {
        let unit = BlockUnit {
            id: ElementId(0),
            children: Vec::new(),
            storable_units: Vec::new(),
            source_ref: self.source_ref(b.span),
        };
        let id = if b.handlers.is_empty() {
            self.alloc(Element::BlockUnit(unit))
        } else {
            self.alloc(Element::TryUnit(unit))
        };
        self.scopes.push(BTreeMap::new());
        for d in &b.declarations {
            let mut acc = Access::default();
            let init = d.init.as_ref().map(|e| self.expr(e, &mut acc));
            let sid = self.alloc(Element::StorableUnit(StorableUnit {
                id: ElementId(0),
                name: d.name.name.clone(),
                declared_type: Some(d.ty),
                scope: Scope::Local,
                role: StorableRole::Variable,
                init,
                source_ref: Some(self.source_ref(d.span)),
            }));
            self.scopes.last_mut().unwrap().insert(d.name.key(), sid);
            storables.push(sid);
        }
        let mut children = self.statements(&b.statements);
        for h in &b.handlers {
            let catch = self.alloc(Element::CatchUnit(CatchUnit {
                id: ElementId(0),
                exceptions: h
                    .exceptions
                    .iter()
                    .map(|e| match e {
                        ExceptionName::Others => "OTHERS".to_string(),
                        ExceptionName::Named(n) => n.name.clone(),
                    })
                    .collect(),
                children: Vec::new(),
                source_ref: self.source_ref(h.span),
            }));
            let kids = self.statements(&h.statements);
            self.set_children(catch, kids);
            children.push(catch);
        }
        self.scopes.pop();
        match &mut self.elements[id.index()] {
            Element::BlockUnit(u) | Element::TryUnit(u) => {
                u.children = children;
                u.storable_units = storables;
            }
            _ => unreachable!(),
        }
        id
    }

    fn statements(&mut self, stmts: &[Statement]) -> Vec<ElementId> {
        stmts.iter().map(|s| self.statement(s)).collect()
    }

    fn action(&mut self, name: Stereotype, span: Span) -> ElementId {
        self.alloc(Element::ActionElement(ActionElement {
            id: ElementId(0),
            name,
            kind: name.as_str().to_lowercase(),
            children: Vec::new(),
            reads: Vec::new(),
            writes: Vec::new(),
            calls: Vec::new(),
            detail: ActionDetail::None,
            source_ref: self.source_ref(span),
        }))
    }

    fn finish(&mut self, id: ElementId, acc: Access, detail: ActionDetail, children: Vec<ElementId>) {
        if let Element::ActionElement(a) = &mut self.elements[id.index()] {
            a.reads = acc.reads;
            a.writes = acc.writes;
            a.calls = acc.calls;
            a.detail = detail;
            a.children = children;
        }
    }

    fn statement(&mut self, s: &Statement) -> ElementId {
        let mut acc = Access::default();
        match &s.kind {
            StatementKind::Assign { target, value } => {
                let id = self.action(Stereotype::Assign, s.span);
                let value = self.expr(value, &mut acc);
                let target = self.target(target, &mut acc);
                self.finish(id, acc, ActionDetail::Assign { target, value }, Vec::new());
                id
            }
            StatementKind::If { branches, else_branch } => {
                let id = self.action(Stereotype::If, s.span);
                let cond = self.expr(&branches[0].cond, &mut acc);
                let mut children = self.statements(&branches[0].statements);
                for b in &branches[1..] {
                    children.push(self.cond_branch(Stereotype::Elsif, b));
                }
                if let Some(e) = else_branch {
                    children.push(self.else_branch(e));
                }
                self.finish(id, acc, ActionDetail::Cond { cond }, children);
                id
            }
            StatementKind::Case {
                selector,
                whens,
                else_branch,
            } => {
                let id = self.action(Stereotype::Case, s.span);
                let mut children = Vec::new();
                for w in whens {
                    // A simple CASE compares the selector with each WHEN value.
                    let branch = match selector {
                        Some(sel) => CondBranch {
                            cond: Expr {
                                kind: ExprKind::Binary {
                                    op: BinOp::Eq,
                                    lhs: Box::new(sel.clone()),
                                    rhs: Box::new(w.cond.clone()),
                                },
                                span: w.cond.span,
                            },
                            statements: w.statements.clone(),
                            span: w.span,
                        },
                        None => w.clone(),
                    };
                    children.push(self.cond_branch(Stereotype::Elsif, &branch));
                }
                if let Some(e) = else_branch {
                    children.push(self.else_branch(e));
                }
                self.finish(id, acc, ActionDetail::None, children);
                id
            }
            StatementKind::While { cond, body } => {
                let id = self.action(Stereotype::While, s.span);
                let cond = self.expr(cond, &mut acc);
                let children = self.statements(body);
                self.finish(id, acc, ActionDetail::Cond { cond }, children);
                id
            }
            StatementKind::For { var, lo, hi, body } => {
                let id = self.action(Stereotype::For, s.span);
                let lo = self.expr(lo, &mut acc);
                let hi = self.expr(hi, &mut acc);
                let vid = self.alloc(Element::StorableUnit(StorableUnit {
                    id: ElementId(0),
                    name: var.name.clone(),
                    declared_type: Some(PlsqlType::Integer),
                    scope: Scope::Local,
                    role: StorableRole::LoopIndex,
                    init: None,
                    source_ref: Some(self.source_ref(var.span)),
                }));
                dedup_push(&mut acc.writes, vid);
                self.scopes.push(BTreeMap::from([(var.key(), vid)]));
                let children = self.statements(body);
                self.scopes.pop();
                self.finish(id, acc, ActionDetail::For { var: vid, lo, hi }, children);
                id
            }
            StatementKind::BasicLoop { body } => {
                let id = self.action(Stereotype::Loop, s.span);
                let children = self.statements(body);
                self.finish(id, acc, ActionDetail::None, children);
                id
            }
            StatementKind::Exit { when } => {
                let id = self.action(Stereotype::Exit, s.span);
                let detail = match when {
                    Some(c) => ActionDetail::Cond {
                        cond: self.expr(c, &mut acc),
                    },
                    None => ActionDetail::None,
                };
                self.finish(id, acc, detail, Vec::new());
                id
            }
            StatementKind::Return { value } => {
                let id = self.action(Stereotype::Return, s.span);
                let value = value.as_ref().map(|v| self.expr(v, &mut acc));
                self.finish(id, acc, ActionDetail::Return { value }, Vec::new());
                id
            }
            StatementKind::Raise { exception } => {
                let id = self.action(Stereotype::Throw, s.span);
                self.finish(
                    id,
                    acc,
                    ActionDetail::Throw {
                        exception: exception.name.clone(),
                    },
                    Vec::new(),
                );
                id
            }
            StatementKind::Call { name, args } => {
                let id = self.action(Stereotype::Call, s.span);
                let callee = self.callee(name);
                acc.calls.push(callee.clone());
                let args = args.iter().map(|a| self.expr(a, &mut acc)).collect();
                self.finish(id, acc, ActionDetail::Call { callee, args }, Vec::new());
                id
            }
            StatementKind::SelectInto { columns, into, tail } => {
                let id = self.action(Stereotype::Select, s.span);
                let columns = columns.iter().map(|c| self.sql(c, &mut acc)).collect();
                let tail = self.sql(tail, &mut acc);
                let into = into.iter().map(|t| self.target(t, &mut acc)).collect();
                self.finish(id, acc, ActionDetail::Select { columns, into, tail }, Vec::new());
                id
            }
            StatementKind::Dml { kind, sql } => {
                let st = match kind {
                    DmlKind::Insert => Stereotype::Insert,
                    DmlKind::Update => Stereotype::Update,
                    DmlKind::Delete => Stereotype::Delete,
                };
                let id = self.action(st, s.span);
                let sql = self.sql(sql, &mut acc);
                self.finish(id, acc, ActionDetail::Dml { sql }, Vec::new());
                id
            }
            StatementKind::InnerBlock(b) => self.block(b, Vec::new()),
        }
    }

    fn cond_branch(&mut self, st: Stereotype, b: &CondBranch) -> ElementId {
        let id = self.action(st, b.span);
        let mut acc = Access::default();
        let cond = self.expr(&b.cond, &mut acc);
        let children = self.statements(&b.statements);
        self.finish(id, acc, ActionDetail::Cond { cond }, children);
        id
    }

    fn else_branch(&mut self, e: &ElseBranch) -> ElementId {
        let id = self.action(Stereotype::Else, e.span);
        let children = self.statements(&e.statements);
        self.finish(id, Access::default(), ActionDetail::None, children);
        id
    }

    fn lookup(&self, key: &str) -> Option<ElementId> {
        self.scopes.iter().rev().find_map(|s| s.get(key).copied())
    }

    fn global(&mut self, name: &str, span: Span, warn: bool) -> ElementId {
        let key = name.to_uppercase();
        if let Some(id) = self.globals.get(&key) {
            return *id;
        }
        if warn {
            self.diagnostics.push(
                Diagnostic::warning(codes::UNDECLARED, format!("`{name}` is not declared; treated as a global variable"))
                    .at(&self.file, span.line, span.col),
            );
        }
        let id = self.alloc(Element::StorableUnit(StorableUnit {
            id: ElementId(0),
            name: name.to_string(),
            declared_type: None,
            scope: Scope::Global,
            role: StorableRole::Variable,
            init: None,
            source_ref: None,
        }));
        self.globals.insert(key, id);
        self.global_ids.push(id);
        id
    }

    fn bind(&mut self, b: &BindRef) -> Target {
        if b.is_global() {
            let name = format!("{}.{}", b.block.name, b.item.name);
            return Target::Var(self.global(&name, b.item.span, false));
        }
        let wi = self
            .form
            .windows
            .iter()
            .position(|w| w.answers_to(&b.block.key()))
            .expect("binds are checked by the parser");
        Target::Ui(self.ui[&(wi, b.item.key())])
    }

    fn var(&mut self, name: &Ident) -> ElementId {
        match self.lookup(&name.key()) {
            Some(id) => id,
            None => self.global(&name.name, name.span, true),
        }
    }

    fn target(&mut self, t: &AssignTarget, acc: &mut Access) -> Target {
        let target = match t {
            AssignTarget::Var(v) => Target::Var(self.var(v)),
            AssignTarget::Bind(b) => self.bind(b),
        };
        dedup_push(&mut acc.writes, target.id());
        target
    }

    fn callee(&self, name: &Ident) -> Callee {
        // Resolved against program units once all of them exist.
        Callee::Builtin(name.name.clone())
    }

    fn expr(&mut self, e: &Expr, acc: &mut Access) -> KExpr {
        match &e.kind {
            ExprKind::Binary { op, lhs, rhs } => KExpr::Binary {
                op: *op,
                lhs: Box::new(self.expr(lhs, acc)),
                rhs: Box::new(self.expr(rhs, acc)),
            },
            ExprKind::Unary { op, operand } => KExpr::Unary {
                op: *op,
                operand: Box::new(self.expr(operand, acc)),
            },
            ExprKind::Literal(l) => KExpr::Literal(l.clone()),
            ExprKind::Var(v) => {
                if let Some(id) = self.lookup(&v.key()) {
                    dedup_push(&mut acc.reads, id);
                    return KExpr::Var(id);
                }
                let key = v.key();
                if FORMS_CONSTANTS.contains(&key.as_str()) {
                    return KExpr::Symbol(key);
                }
                if ZERO_ARG_BUILTINS.contains(&key.as_str()) {
                    let callee = Callee::Builtin(v.name.clone());
                    acc.calls.push(callee.clone());
                    return KExpr::Call { callee, args: Vec::new() };
                }
                let id = self.global(&v.name, v.span, true);
                dedup_push(&mut acc.reads, id);
                KExpr::Var(id)
            }
            ExprKind::Bind(b) => {
                let t = self.bind(b);
                dedup_push(&mut acc.reads, t.id());
                match t {
                    Target::Var(id) => KExpr::Var(id),
                    Target::Ui(id) => KExpr::Ui(id),
                }
            }
            ExprKind::Call { name, args } => {
                let callee = self.callee(name);
                acc.calls.push(callee.clone());
                KExpr::Call {
                    callee,
                    args: args.iter().map(|a| self.expr(a, acc)).collect(),
                }
            }
        }
    }

    fn sql(&mut self, frag: &SqlFragment, acc: &mut Access) -> KSql {
        let mut binds = Vec::new();
        for r in &frag.refs {
            let target = match &r.target {
                SqlRefTarget::Bind(b) => self.bind(b),
                // Identifiers that name no PL/SQL variable are columns.
                SqlRefTarget::Ident(id) => match self.lookup(&id.key()) {
                    Some(v) => Target::Var(v),
                    None => continue,
                },
            };
            dedup_push(&mut acc.reads, target.id());
            binds.push(SqlBind {
                offset: r.offset,
                len: r.len,
                target,
            });
        }
        KSql {
            text: frag.text.clone(),
            binds,
        }
    }

    fn resolve_calls(&mut self, units: &BTreeMap<String, ElementId>) {
        let resolve = |c: &mut Callee| {
            if let Callee::Builtin(name) = c {
                if let Some(id) = units.get(&name.to_uppercase()) {
                    *c = Callee::Unit(*id);
                }
            }
        };
        let fix_expr = |e: &mut KExpr| {
            e.visit_mut(&mut |x| {
                if let KExpr::Call { callee, .. } = x {
                    resolve(callee)
                }
            })
        };
        for e in &mut self.elements {
            match e {
                Element::ActionElement(a) => {
                    a.calls.iter_mut().for_each(resolve);
                    match &mut a.detail {
                        ActionDetail::Assign { value, .. } => fix_expr(value),
                        ActionDetail::Cond { cond } => fix_expr(cond),
                        ActionDetail::For { lo, hi, .. } => {
                            fix_expr(lo);
                            fix_expr(hi);
                        }
                        ActionDetail::Return { value: Some(v) } => fix_expr(v),
                        ActionDetail::Call { callee, args } => {
                            resolve(callee);
                            args.iter_mut().for_each(fix_expr);
                        }
                        _ => {}
                    }
                }
                Element::StorableUnit(s) => {
                    if let Some(init) = &mut s.init {
                        fix_expr(init);
                    }
                }
                _ => {}
            }
        }
    }
}
