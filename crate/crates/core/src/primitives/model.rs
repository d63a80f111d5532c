use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::frontend::ast::{DmlKind, Literal, PlsqlType};
use crate::kdm::ElementId;

/// Variable id, serialized as `"v<n>"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl Serialize for VarId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VarId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.strip_prefix('v')
            .and_then(|n| n.parse().ok())
            .map(VarId)
            .ok_or_else(|| serde::de::Error::custom(format!("bad variable id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Local,
    Parameter,
    LoopIndex,
    Global,
    Ui,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub kind: VarKind,
    pub ty: Option<PlsqlType>,
    /// Block name qualifying a UI variable.
    pub screen: Option<String>,
    /// StorableUnit or UIResource this variable comes from.
    pub kdm: ElementId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcRef {
    /// Id of a [`Code`] built from a program unit.
    Code(String),
    Builtin(String),
}

impl ProcRef {
    pub fn name(&self) -> &str {
        match self {
            ProcRef::Code(c) | ProcRef::Builtin(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataOp {
    Add,
    Sub,
    Mul,
    Div,
    Concat,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CondOp {
    And,
    Or,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    Eq,
    NotEq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Readable {
    /// ReadFrom, ReadFromUI or ManipulateData.
    Primitive(Box<Primitive>),
    ReturnValue {
        callee: ProcRef,
        args: Vec<Readable>,
    },
    Constant(Literal),
    /// Predefined Forms constant.
    Symbol(String),
    Condition(Box<Expression>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expression {
    Binary {
        op: CondOp,
        lhs: Box<Expression>,
        rhs: Box<Expression>,
    },
    Not(Box<Expression>),
    Operand(Readable),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlArg {
    pub offset: usize,
    pub len: usize,
    pub var: VarId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlText {
    pub text: String,
    pub args: Vec<SqlArg>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub condition: Option<Expression>,
    pub body: Vec<Primitive>,
    pub kdm_ref: Vec<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catch {
    pub exceptions: Vec<String>,
    pub body: Vec<Primitive>,
    pub kdm_ref: Vec<ElementId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionKind {
    IfElse,
    Switch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LoopKind {
    While,
    For { var: VarId, lo: Readable, hi: Readable },
    Basic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "primitive")]
pub enum PrimitiveKind {
    ReadFrom { var: VarId },
    WriteTo { var: VarId, inputs: Vec<Readable> },
    ReadFromUI { var: VarId },
    WriteToUI { var: VarId, inputs: Vec<Readable> },
    /// One SELECT; the INTO list is split later, one read per target.
    ReadFromDB { columns: Vec<SqlText>, tail: SqlText, into: Vec<VarId> },
    WriteToDB { dml: DmlKind, sql: SqlText },
    ManipulateData { op: DataOp, inputs: Vec<Readable>, output_var: Option<VarId> },
    ModifyUI { builtin: String, args: Vec<Readable> },
    SelectionFlow { kind: SelectionKind, cases: Vec<Case> },
    Loop { kind: LoopKind, condition: Option<Expression>, body: Vec<Primitive> },
    Break,
    CallProcedure { callee: ProcRef, args: Vec<Readable> },
    Return { value: Option<Readable> },
    Try { body: Vec<Primitive>, catches: Vec<Catch> },
    Throw { exception: String },
    ShowMessage { builtin: String, args: Vec<Readable> },
    OpenView { builtin: String, args: Vec<Readable> },
}

impl PrimitiveKind {
    pub const NAMES: [&'static str; 17] = [
        "ReadFrom",
        "WriteTo",
        "ReadFromUI",
        "WriteToUI",
        "ReadFromDB",
        "WriteToDB",
        "ManipulateData",
        "ModifyUI",
        "SelectionFlow",
        "Loop",
        "Break",
        "CallProcedure",
        "Return",
        "Try",
        "Throw",
        "ShowMessage",
        "OpenView",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PrimitiveKind::ReadFrom { .. } => "ReadFrom",
            PrimitiveKind::WriteTo { .. } => "WriteTo",
            PrimitiveKind::ReadFromUI { .. } => "ReadFromUI",
            PrimitiveKind::WriteToUI { .. } => "WriteToUI",
            PrimitiveKind::ReadFromDB { .. } => "ReadFromDB",
            PrimitiveKind::WriteToDB { .. } => "WriteToDB",
            PrimitiveKind::ManipulateData { .. } => "ManipulateData",
            PrimitiveKind::ModifyUI { .. } => "ModifyUI",
            PrimitiveKind::SelectionFlow { .. } => "SelectionFlow",
            PrimitiveKind::Loop { .. } => "Loop",
            PrimitiveKind::Break => "Break",
            PrimitiveKind::CallProcedure { .. } => "CallProcedure",
            PrimitiveKind::Return { .. } => "Return",
            PrimitiveKind::Try { .. } => "Try",
            PrimitiveKind::Throw { .. } => "Throw",
            PrimitiveKind::ShowMessage { .. } => "ShowMessage",
            PrimitiveKind::OpenView { .. } => "OpenView",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    #[serde(flatten)]
    pub kind: PrimitiveKind,
    pub kdm_ref: Vec<ElementId>,
}

impl Primitive {
    pub fn is_modify_ui(&self) -> bool {
        matches!(self.kind, PrimitiveKind::ModifyUI { .. })
    }

    /// Statement-level children: case bodies, loop bodies, try bodies and catches.
    pub fn child_lists(&self) -> Vec<&[Primitive]> {
        match &self.kind {
            PrimitiveKind::SelectionFlow { cases, .. } => cases.iter().map(|c| c.body.as_slice()).collect(),
            PrimitiveKind::Loop { body, .. } => vec![body.as_slice()],
            PrimitiveKind::Try { body, catches } => {
                let mut v = vec![body.as_slice()];
                v.extend(catches.iter().map(|c| c.body.as_slice()));
                v
            }
            _ => Vec::new(),
        }
    }

    /// Readables consumed directly by this primitive (not by nested statements).
    pub fn readables(&self) -> Vec<&Readable> {
        let mut out = Vec::new();
        match &self.kind {
            PrimitiveKind::WriteTo { inputs, .. }
            | PrimitiveKind::WriteToUI { inputs, .. }
            | PrimitiveKind::ManipulateData { inputs, .. } => out.extend(inputs),
            PrimitiveKind::ModifyUI { args, .. }
            | PrimitiveKind::CallProcedure { args, .. }
            | PrimitiveKind::ShowMessage { args, .. }
            | PrimitiveKind::OpenView { args, .. } => out.extend(args),
            PrimitiveKind::Return { value: Some(v) } => out.push(v),
            PrimitiveKind::Loop { kind: LoopKind::For { lo, hi, .. }, .. } => {
                out.push(lo);
                out.push(hi);
            }
            _ => {}
        }
        out
    }

    /// Conditions owned by this primitive (case conditions, loop condition).
    pub fn conditions(&self) -> Vec<&Expression> {
        match &self.kind {
            PrimitiveKind::SelectionFlow { cases, .. } => cases.iter().filter_map(|c| c.condition.as_ref()).collect(),
            PrimitiveKind::Loop { condition: Some(c), .. } => vec![c],
            _ => Vec::new(),
        }
    }

    /// Visits every readable of this primitive and of the primitives nested below it.
    pub fn visit_readables(&self, f: &mut dyn FnMut(&Readable)) {
        for r in self.readables() {
            r.visit(f);
        }
        for c in self.conditions() {
            c.visit_readables(f);
        }
        for list in self.child_lists() {
            for p in list {
                p.visit_readables(f);
            }
        }
    }

    /// Program units called from this primitive or below it.
    pub fn called_codes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut add = |c: &ProcRef| {
            if let ProcRef::Code(id) = c {
                if !out.contains(id) {
                    out.push(id.clone());
                }
            }
        };
        self.visit(&mut |p| {
            if let PrimitiveKind::CallProcedure { callee, .. } = &p.kind {
                add(callee)
            }
        });
        self.visit_readables(&mut |r| {
            if let Readable::ReturnValue { callee, .. } = r {
                add(callee)
            }
        });
        out
    }

    /// Visits this primitive and every primitive nested below it, including
    /// those inside readables and expressions.
    pub fn visit(&self, f: &mut dyn FnMut(&Primitive)) {
        f(self);
        for r in self.readables() {
            r.visit_primitives(f);
        }
        for c in self.conditions() {
            c.visit_primitives(f);
        }
        for list in self.child_lists() {
            for p in list {
                p.visit(f);
            }
        }
    }
}

impl Readable {
    /// Visits this readable and every readable nested below it.
    pub fn visit(&self, f: &mut dyn FnMut(&Readable)) {
        f(self);
        match self {
            Readable::Primitive(p) => p.visit_readables(f),
            Readable::ReturnValue { args, .. } => args.iter().for_each(|a| a.visit(f)),
            Readable::Condition(e) => e.visit_readables(f),
            Readable::Constant(_) | Readable::Symbol(_) => {}
        }
    }

    pub fn visit_primitives(&self, f: &mut dyn FnMut(&Primitive)) {
        match self {
            Readable::Primitive(p) => p.visit(f),
            Readable::ReturnValue { args, .. } => args.iter().for_each(|a| a.visit_primitives(f)),
            Readable::Condition(e) => e.visit_primitives(f),
            Readable::Constant(_) | Readable::Symbol(_) => {}
        }
    }
}

impl Expression {
    pub fn visit_readables(&self, f: &mut dyn FnMut(&Readable)) {
        match self {
            Expression::Binary { lhs, rhs, .. } => {
                lhs.visit_readables(f);
                rhs.visit_readables(f);
            }
            Expression::Not(e) => e.visit_readables(f),
            Expression::Operand(r) => r.visit(f),
        }
    }

    pub fn visit_primitives(&self, f: &mut dyn FnMut(&Primitive)) {
        match self {
            Expression::Binary { lhs, rhs, .. } => {
                lhs.visit_primitives(f);
                rhs.visit_primitives(f);
            }
            Expression::Not(e) => e.visit_primitives(f),
            Expression::Operand(r) => r.visit_primitives(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CodeOrigin {
    Trigger,
    ProgramUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Code {
    pub id: String,
    pub origin: ElementId,
    pub origin_kind: CodeOrigin,
    pub name: String,
    pub return_type: Option<PlsqlType>,
    pub parameters: Vec<VarId>,
    pub local_variables: Vec<Variable>,
    pub primitives: Vec<Primitive>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionDecl {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitivesRoot {
    pub form_name: String,
    pub codes: Vec<Code>,
    /// Global and UI variables.
    pub variables: Vec<Variable>,
    pub exceptions: Vec<ExceptionDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown primitive variant `{0}`")]
pub struct UnknownVariant(pub String);

impl PrimitivesRoot {
    pub fn code(&self, id: &str) -> Option<&Code> {
        self.codes.iter().find(|c| c.id == id)
    }

    pub fn code_by_origin(&self, origin: ElementId) -> Option<&Code> {
        self.codes.iter().find(|c| c.origin == origin)
    }

    /// Looks a variable up among the root variables and every code's locals.
    pub fn variable(&self, id: VarId) -> Option<&Variable> {
        self.variables
            .iter()
            .chain(self.codes.iter().flat_map(|c| c.local_variables.iter()))
            .find(|v| v.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("primitives serialize")
    }

    pub fn from_json(text: &str) -> Result<PrimitivesRoot, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Deep count of primitives of one variant, including nested ones.
pub fn count_primitives(root: &PrimitivesRoot, variant: &str) -> Result<usize, UnknownVariant> {
    if !PrimitiveKind::NAMES.contains(&variant) {
        return Err(UnknownVariant(variant.to_string()));
    }
    Ok(root.codes.iter().map(|c| count_in(&c.primitives, variant)).sum())
}

pub fn count_in(prims: &[Primitive], variant: &str) -> usize {
    let mut n = 0;
    for p in prims {
        p.visit(&mut |q| {
            if q.kind.name() == variant {
                n += 1
            }
        });
    }
    n
}
