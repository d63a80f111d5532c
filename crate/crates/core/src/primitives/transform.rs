//! Code model to primitives.
//!
//! The iterator walks KDM code elements in order, the analyzer decides which
//! primitive each one becomes, the builder assembles it and the reference
//! resolver maps storable units, UI resources and callables to ids.

use std::collections::BTreeMap;

use super::model::*;
use crate::builtins::{classify, BuiltinClass};
use crate::diagnostics::{codes, Diagnostic};
use crate::frontend::ast::{BinOp, DmlKind, UnOp};
use crate::kdm::{
    ActionDetail, ActionElement, Callee, CallableUnit, CodeModel, Element, ElementId, KExpr, KSql, Origin,
    Scope, Stereotype, StorableRole, Target,
};

pub struct Transformation {
    pub root: PrimitivesRoot,
    pub diagnostics: Vec<Diagnostic>,
}

impl Transformation {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.is_error())
    }
}

struct ReferenceResolver {
    vars: BTreeMap<ElementId, VarId>,
    codes: BTreeMap<ElementId, String>,
    next: u32,
}

impl ReferenceResolver {
    fn new(model: &CodeModel) -> ReferenceResolver {
        let codes = model
            .roots
            .iter()
            .enumerate()
            .map(|(i, r)| (*r, format!("c{}", i + 1)))
            .collect();
        ReferenceResolver {
            vars: BTreeMap::new(),
            codes,
            next: 1,
        }
    }

    fn declare(&mut self, kdm: ElementId) -> VarId {
        let id = VarId(self.next);
        self.next += 1;
        self.vars.insert(kdm, id);
        id
    }

    fn var(&self, kdm: ElementId) -> VarId {
        self.vars[&kdm]
    }

    fn target(&self, t: Target) -> VarId {
        self.var(t.id())
    }

    fn proc(&self, callee: &Callee) -> ProcRef {
        match callee {
            Callee::Unit(u) => ProcRef::Code(self.codes[u].clone()),
            Callee::Builtin(name) => ProcRef::Builtin(name.clone()),
        }
    }
}

enum Analysis {
    WriteTo,
    WriteToUI,
    ReadFromDB,
    WriteToDB(DmlKind),
    Selection(SelectionKind),
    Loop,
    Break,
    ConditionalBreak,
    Return,
    Throw,
    Call(BuiltinClass),
    Unmapped(String),
}

fn analyze(a: &ActionElement) -> Analysis {
    match (a.name, &a.detail) {
        (Stereotype::Assign, ActionDetail::Assign { target: Target::Var(_), .. }) => Analysis::WriteTo,
        (Stereotype::Assign, ActionDetail::Assign { target: Target::Ui(_), .. }) => Analysis::WriteToUI,
        (Stereotype::Select, ActionDetail::Select { .. }) => Analysis::ReadFromDB,
        (Stereotype::Insert, ActionDetail::Dml { .. }) => Analysis::WriteToDB(DmlKind::Insert),
        (Stereotype::Update, ActionDetail::Dml { .. }) => Analysis::WriteToDB(DmlKind::Update),
        (Stereotype::Delete, ActionDetail::Dml { .. }) => Analysis::WriteToDB(DmlKind::Delete),
        (Stereotype::If, ActionDetail::Cond { .. }) => Analysis::Selection(SelectionKind::IfElse),
        (Stereotype::Case, _) => Analysis::Selection(SelectionKind::Switch),
        (Stereotype::Loop, _) | (Stereotype::While, ActionDetail::Cond { .. }) | (Stereotype::For, ActionDetail::For { .. }) => {
            Analysis::Loop
        }
        (Stereotype::Exit, ActionDetail::None) => Analysis::Break,
        (Stereotype::Exit, ActionDetail::Cond { .. }) => Analysis::ConditionalBreak,
        (Stereotype::Return, ActionDetail::Return { .. }) => Analysis::Return,
        (Stereotype::Throw | Stereotype::Raise, ActionDetail::Throw { .. }) => Analysis::Throw,
        (Stereotype::Call, ActionDetail::Call { callee, .. }) => match callee {
            Callee::Unit(_) => Analysis::Call(BuiltinClass::Other),
            Callee::Builtin(name) => Analysis::Call(classify(name)),
        },
        (s, _) => Analysis::Unmapped(s.as_str().to_string()),
    }
}

struct Builder<'m> {
    model: &'m CodeModel,
    refs: ReferenceResolver,
    diagnostics: Vec<Diagnostic>,
    exceptions: Vec<String>,
    loop_depth: usize,
}

impl Builder<'_> {
    fn unmapped(&mut self, id: ElementId, what: &str) {
        let mut d = Diagnostic::error(codes::UNMAPPED_STEREOTYPE, format!("{id}: no primitive for {what}"));
        if let Some(sr) = self.model.get(id).and_then(|e| e.source_ref()) {
            d = d.at(&sr.file, sr.span.line, sr.span.col);
        }
        self.diagnostics.push(d);
    }

    fn exception(&mut self, name: &str) {
        if !name.eq_ignore_ascii_case("OTHERS") && !self.exceptions.iter().any(|e| e.eq_ignore_ascii_case(name)) {
            self.exceptions.push(name.to_string());
        }
    }

    /// Iterates code elements in order, producing their primitives.
    fn iterate(&mut self, children: &[ElementId]) -> Vec<Primitive> {
        let mut out = Vec::new();
        for c in children {
            match self.model.element(*c) {
                Element::BlockUnit(b) => {
                    out.extend(self.initializers(&b.storable_units));
                    out.extend(self.iterate(&b.children));
                }
                Element::TryUnit(b) => {
                    let mut body = self.initializers(&b.storable_units);
                    let mut catches = Vec::new();
                    let mut plain = Vec::new();
                    for child in &b.children {
                        match self.model.element(*child) {
                            Element::CatchUnit(cu) => {
                                for e in &cu.exceptions {
                                    self.exception(e);
                                }
                                catches.push(Catch {
                                    exceptions: cu.exceptions.clone(),
                                    body: self.iterate(&cu.children),
                                    kdm_ref: vec![cu.id],
                                });
                            }
                            _ => plain.push(*child),
                        }
                    }
                    body.extend(self.iterate(&plain));
                    out.push(Primitive {
                        kind: PrimitiveKind::Try { body, catches },
                        kdm_ref: vec![b.id],
                    });
                }
                Element::ActionElement(a) => {
                    if let Some(p) = self.action(a) {
                        out.push(p);
                    }
                }
                other => self.unmapped(*c, other.type_name()),
            }
        }
        out
    }

    fn initializers(&mut self, storables: &[ElementId]) -> Vec<Primitive> {
        let mut out = Vec::new();
        for s in storables {
            let su = self.model.storable(*s).expect("storable");
            if let Some(init) = &su.init {
                let value = self.readable(init, *s);
                out.push(Primitive {
                    kind: PrimitiveKind::WriteTo {
                        var: self.refs.var(*s),
                        inputs: vec![value],
                    },
                    kdm_ref: vec![*s],
                });
            }
        }
        out
    }

    fn action(&mut self, a: &ActionElement) -> Option<Primitive> {
        let kind = match (analyze(a), &a.detail) {
            (Analysis::WriteTo, ActionDetail::Assign { target, value }) => PrimitiveKind::WriteTo {
                var: self.refs.target(*target),
                inputs: vec![self.readable(value, a.id)],
            },
            (Analysis::WriteToUI, ActionDetail::Assign { target, value }) => PrimitiveKind::WriteToUI {
                var: self.refs.target(*target),
                inputs: vec![self.readable(value, a.id)],
            },
            (Analysis::ReadFromDB, ActionDetail::Select { columns, into, tail }) => PrimitiveKind::ReadFromDB {
                columns: columns.iter().map(|c| self.sql(c)).collect(),
                tail: self.sql(tail),
                into: into.iter().map(|t| self.refs.target(*t)).collect(),
            },
            (Analysis::WriteToDB(dml), ActionDetail::Dml { sql }) => PrimitiveKind::WriteToDB { dml, sql: self.sql(sql) },
            (Analysis::Selection(kind), detail) => {
                let mut cases = Vec::new();
                let mut first = Vec::new();
                for c in &a.children {
                    match self.model.action(*c) {
                        Some(b) if b.name == Stereotype::Elsif => {
                            let condition = match &b.detail {
                                ActionDetail::Cond { cond } => Some(self.expression(cond, b.id)),
                                _ => None,
                            };
                            let body = self.iterate(&b.children);
                            cases.push(Case {
                                condition,
                                body,
                                kdm_ref: vec![b.id],
                            });
                        }
                        Some(b) if b.name == Stereotype::Else => {
                            let body = self.iterate(&b.children);
                            if !body.is_empty() {
                                cases.push(Case {
                                    condition: None,
                                    body,
                                    kdm_ref: vec![b.id],
                                });
                            }
                        }
                        _ => first.push(*c),
                    }
                }
                if let ActionDetail::Cond { cond } = detail {
                    let body = self.iterate(&first);
                    cases.insert(
                        0,
                        Case {
                            condition: Some(self.expression(cond, a.id)),
                            body,
                            kdm_ref: vec![a.id],
                        },
                    );
                }
                PrimitiveKind::SelectionFlow { kind, cases }
            }
            (Analysis::Loop, detail) => {
                self.loop_depth += 1;
                let body = self.iterate(&a.children);
                self.loop_depth -= 1;
                match detail {
                    ActionDetail::Cond { cond } => PrimitiveKind::Loop {
                        kind: LoopKind::While,
                        condition: Some(self.expression(cond, a.id)),
                        body,
                    },
                    ActionDetail::For { var, lo, hi } => {
                        let v = self.refs.var(*var);
                        let hi = self.readable(hi, a.id);
                        let condition = Expression::Binary {
                            op: CondOp::LessEq,
                            lhs: Box::new(Expression::Operand(self.read_var(v, false, a.id))),
                            rhs: Box::new(Expression::Operand(hi.clone())),
                        };
                        PrimitiveKind::Loop {
                            kind: LoopKind::For {
                                var: v,
                                lo: self.readable(lo, a.id),
                                hi,
                            },
                            condition: Some(condition),
                            body,
                        }
                    }
                    _ => PrimitiveKind::Loop {
                        kind: LoopKind::Basic,
                        condition: None,
                        body,
                    },
                }
            }
            (Analysis::Break | Analysis::ConditionalBreak, _) if self.loop_depth == 0 => {
                self.unmapped(a.id, "EXIT outside of a loop");
                return None;
            }
            (Analysis::Break, _) => PrimitiveKind::Break,
            (Analysis::ConditionalBreak, ActionDetail::Cond { cond }) => PrimitiveKind::SelectionFlow {
                kind: SelectionKind::IfElse,
                cases: vec![Case {
                    condition: Some(self.expression(cond, a.id)),
                    body: vec![Primitive {
                        kind: PrimitiveKind::Break,
                        kdm_ref: vec![a.id],
                    }],
                    kdm_ref: vec![a.id],
                }],
            },
            (Analysis::Return, ActionDetail::Return { value }) => PrimitiveKind::Return {
                value: value.as_ref().map(|v| self.readable(v, a.id)),
            },
            (Analysis::Throw, ActionDetail::Throw { exception }) => {
                self.exception(exception);
                PrimitiveKind::Throw {
                    exception: exception.clone(),
                }
            }
            (Analysis::Call(class), ActionDetail::Call { callee, args }) => {
                let args: Vec<Readable> = args.iter().map(|x| self.readable(x, a.id)).collect();
                let name = match callee {
                    Callee::Builtin(n) => n.to_uppercase(),
                    Callee::Unit(_) => String::new(),
                };
                match class {
                    BuiltinClass::ModifyUi => PrimitiveKind::ModifyUI { builtin: name, args },
                    BuiltinClass::ShowMessage => PrimitiveKind::ShowMessage { builtin: name, args },
                    BuiltinClass::OpenView => PrimitiveKind::OpenView { builtin: name, args },
                    BuiltinClass::Other => PrimitiveKind::CallProcedure {
                        callee: self.refs.proc(callee),
                        args,
                    },
                }
            }
            (Analysis::Unmapped(what), _) => {
                self.unmapped(a.id, &what);
                return None;
            }
            _ => {
                self.unmapped(a.id, &format!("{} with detail {:?}", a.name.as_str(), a.detail));
                return None;
            }
        };
        Some(Primitive {
            kind,
            kdm_ref: vec![a.id],
        })
    }

    fn read_var(&self, var: VarId, ui: bool, owner: ElementId) -> Readable {
        let kind = if ui {
            PrimitiveKind::ReadFromUI { var }
        } else {
            PrimitiveKind::ReadFrom { var }
        };
        Readable::Primitive(Box::new(Primitive {
            kind,
            kdm_ref: vec![owner],
        }))
    }

    fn readable(&mut self, e: &KExpr, owner: ElementId) -> Readable {
        match e {
            KExpr::Binary { op, lhs, rhs } => match data_op(*op) {
                Some(op) => Readable::Primitive(Box::new(Primitive {
                    kind: PrimitiveKind::ManipulateData {
                        op,
                        inputs: vec![self.readable(lhs, owner), self.readable(rhs, owner)],
                        output_var: None,
                    },
                    kdm_ref: vec![owner],
                })),
                None => Readable::Condition(Box::new(self.expression(e, owner))),
            },
            KExpr::Unary { op: UnOp::Neg, operand } => Readable::Primitive(Box::new(Primitive {
                kind: PrimitiveKind::ManipulateData {
                    op: DataOp::Neg,
                    inputs: vec![self.readable(operand, owner)],
                    output_var: None,
                },
                kdm_ref: vec![owner],
            })),
            KExpr::Unary { op: UnOp::Not, .. } => Readable::Condition(Box::new(self.expression(e, owner))),
            KExpr::Literal(l) => Readable::Constant(l.clone()),
            KExpr::Symbol(s) => Readable::Symbol(s.clone()),
            KExpr::Var(id) => self.read_var(self.refs.var(*id), false, owner),
            KExpr::Ui(id) => self.read_var(self.refs.var(*id), true, owner),
            KExpr::Call { callee, args } => Readable::ReturnValue {
                callee: self.refs.proc(callee),
                args: args.iter().map(|a| self.readable(a, owner)).collect(),
            },
        }
    }

    fn expression(&mut self, e: &KExpr, owner: ElementId) -> Expression {
        match e {
            KExpr::Binary { op, lhs, rhs } => match cond_op(*op) {
                Some(op) => Expression::Binary {
                    op,
                    lhs: Box::new(self.expression(lhs, owner)),
                    rhs: Box::new(self.expression(rhs, owner)),
                },
                None => Expression::Operand(self.readable(e, owner)),
            },
            KExpr::Unary { op: UnOp::Not, operand } => Expression::Not(Box::new(self.expression(operand, owner))),
            _ => Expression::Operand(self.readable(e, owner)),
        }
    }

    fn sql(&self, s: &KSql) -> SqlText {
        SqlText {
            text: s.text.clone(),
            args: s
                .binds
                .iter()
                .map(|b| SqlArg {
                    offset: b.offset,
                    len: b.len,
                    var: self.refs.target(b.target),
                })
                .collect(),
        }
    }
}

fn data_op(op: BinOp) -> Option<DataOp> {
    Some(match op {
        BinOp::Add => DataOp::Add,
        BinOp::Sub => DataOp::Sub,
        BinOp::Mul => DataOp::Mul,
        BinOp::Div => DataOp::Div,
        BinOp::Concat => DataOp::Concat,
        _ => return None,
    })
}

fn cond_op(op: BinOp) -> Option<CondOp> {
    Some(match op {
        BinOp::And => CondOp::And,
        BinOp::Or => CondOp::Or,
        BinOp::Lt => CondOp::Less,
        BinOp::Le => CondOp::LessEq,
        BinOp::Gt => CondOp::Greater,
        BinOp::Ge => CondOp::GreaterEq,
        BinOp::Eq => CondOp::Eq,
        BinOp::Ne => CondOp::NotEq,
        _ => return None,
    })
}

fn variable(model: &CodeModel, refs: &mut ReferenceResolver, id: ElementId) -> Variable {
    let su = model.storable(id).expect("storable");
    let kind = match (su.scope, su.role) {
        (Scope::Global, _) => VarKind::Global,
        (_, StorableRole::Parameter) => VarKind::Parameter,
        (_, StorableRole::LoopIndex) => VarKind::LoopIndex,
        (_, StorableRole::Variable) => VarKind::Local,
    };
    Variable {
        id: refs.declare(id),
        name: su.name.clone(),
        kind,
        ty: su.declared_type,
        screen: None,
        kdm: id,
    }
}

/// Storable units of a callable: parameters first, then locals and loop indices in element order.
fn locals(model: &CodeModel, unit: &CallableUnit) -> Vec<ElementId> {
    let mut out: Vec<ElementId> = unit.params.clone();
    model.walk(unit.body, &mut |e| match e {
        Element::BlockUnit(b) | Element::TryUnit(b) => {
            for s in &b.storable_units {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
        }
        Element::ActionElement(ActionElement {
            detail: ActionDetail::For { var, .. },
            ..
        }) => out.push(*var),
        _ => {}
    });
    out
}

pub fn kdm_to_primitives(model: &CodeModel) -> Transformation {
    let mut refs = ReferenceResolver::new(model);
    let mut variables = Vec::new();
    for s in &model.screens {
        let screen = model.screen(*s).expect("screen");
        for r in &screen.resources {
            let ui = model.ui_resource(*r).expect("ui resource");
            variables.push(Variable {
                id: refs.declare(*r),
                name: ui.name.clone(),
                kind: VarKind::Ui,
                ty: None,
                screen: Some(screen.block.clone()),
                kdm: *r,
            });
        }
    }
    for g in &model.globals {
        variables.push(variable(model, &mut refs, *g));
    }
    let mut unit_vars = Vec::new();
    for r in &model.roots {
        let unit = model.callable(*r).expect("root callable");
        let vars: Vec<Variable> = locals(model, unit)
            .into_iter()
            .map(|s| variable(model, &mut refs, s))
            .collect();
        unit_vars.push(vars);
    }

    let mut b = Builder {
        model,
        refs,
        diagnostics: Vec::new(),
        exceptions: Vec::new(),
        loop_depth: 0,
    };
    let mut codes = Vec::new();
    for (r, local_variables) in model.roots.iter().zip(unit_vars) {
        let unit = model.callable(*r).expect("root callable");
        let primitives = b.iterate(&[unit.body]);
        codes.push(Code {
            id: b.refs.codes[r].clone(),
            origin: unit.id,
            origin_kind: match unit.origin {
                Origin::Trigger => CodeOrigin::Trigger,
                Origin::ProgramUnit => CodeOrigin::ProgramUnit,
            },
            name: unit.name.clone(),
            return_type: unit.return_type,
            parameters: unit.params.iter().map(|p| b.refs.var(*p)).collect(),
            local_variables,
            primitives,
        });
    }
    Transformation {
        root: PrimitivesRoot {
            form_name: model.form_name.clone(),
            codes,
            variables,
            exceptions: b.exceptions.into_iter().map(|name| ExceptionDecl { name }).collect(),
        },
        diagnostics: b.diagnostics,
    }
}
