use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::frontend::ast::{BinOp, Literal, PlsqlType, Span, UnOp, UnitKind, WidgetKind};

/// Index into [`CodeModel::elements`], serialized as `"e<n>"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl Serialize for ElementId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.strip_prefix('e')
            .and_then(|n| n.parse().ok())
            .map(ElementId)
            .ok_or_else(|| serde::de::Error::custom(format!("bad element id `{s}`")))
    }
}

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRef {
    pub file: String,
    pub span: Span,
    pub snippet: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Origin {
    Trigger,
    ProgramUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Stereotype {
    Assign,
    Select,
    Insert,
    Update,
    Delete,
    If,
    Elsif,
    Else,
    Case,
    Loop,
    While,
    For,
    Exit,
    Return,
    Raise,
    Call,
    Throw,
}

impl Stereotype {
    pub const ALL: [Stereotype; 17] = [
        Stereotype::Assign,
        Stereotype::Select,
        Stereotype::Insert,
        Stereotype::Update,
        Stereotype::Delete,
        Stereotype::If,
        Stereotype::Elsif,
        Stereotype::Else,
        Stereotype::Case,
        Stereotype::Loop,
        Stereotype::While,
        Stereotype::For,
        Stereotype::Exit,
        Stereotype::Return,
        Stereotype::Raise,
        Stereotype::Call,
        Stereotype::Throw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stereotype::Assign => "ASSIGN",
            Stereotype::Select => "SELECT",
            Stereotype::Insert => "INSERT",
            Stereotype::Update => "UPDATE",
            Stereotype::Delete => "DELETE",
            Stereotype::If => "IF",
            Stereotype::Elsif => "ELSIF",
            Stereotype::Else => "ELSE",
            Stereotype::Case => "CASE",
            Stereotype::Loop => "LOOP",
            Stereotype::While => "WHILE",
            Stereotype::For => "FOR",
            Stereotype::Exit => "EXIT",
            Stereotype::Return => "RETURN",
            Stereotype::Raise => "RAISE",
            Stereotype::Call => "CALL",
            Stereotype::Throw => "THROW",
        }
    }

    pub fn is_sql(self) -> bool {
        matches!(self, Stereotype::Select | Stereotype::Insert | Stereotype::Update | Stereotype::Delete)
    }

    /// Branch markers only exist as children of IF/CASE.
    pub fn is_structural(self) -> bool {
        matches!(self, Stereotype::Elsif | Stereotype::Else)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scope {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorableRole {
    Variable,
    Parameter,
    LoopIndex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Callee {
    Unit(ElementId),
    Builtin(String),
}

/// Expression with every name resolved to a model element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KExpr {
    Binary {
        op: BinOp,
        lhs: Box<KExpr>,
        rhs: Box<KExpr>,
    },
    Unary {
        op: UnOp,
        operand: Box<KExpr>,
    },
    Literal(Literal),
    /// A predefined Forms constant such as `PROPERTY_TRUE`.
    Symbol(String),
    Var(ElementId),
    Ui(ElementId),
    Call {
        callee: Callee,
        args: Vec<KExpr>,
    },
}

impl KExpr {
    pub fn visit(&self, f: &mut dyn FnMut(&KExpr)) {
        f(self);
        match self {
            KExpr::Binary { lhs, rhs, .. } => {
                lhs.visit(f);
                rhs.visit(f);
            }
            KExpr::Unary { operand, .. } => operand.visit(f),
            KExpr::Call { args, .. } => args.iter().for_each(|a| a.visit(f)),
            _ => {}
        }
    }

    pub fn visit_mut(&mut self, f: &mut dyn FnMut(&mut KExpr)) {
        f(self);
        match self {
            KExpr::Binary { lhs, rhs, .. } => {
                lhs.visit_mut(f);
                rhs.visit_mut(f);
            }
            KExpr::Unary { operand, .. } => operand.visit_mut(f),
            KExpr::Call { args, .. } => args.iter_mut().for_each(|a| a.visit_mut(f)),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Var(ElementId),
    Ui(ElementId),
}

impl Target {
    pub fn id(self) -> ElementId {
        match self {
            Target::Var(id) | Target::Ui(id) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlBind {
    pub offset: usize,
    pub len: usize,
    pub target: Target,
}

/// SQL text with the PL/SQL references it contains, in textual order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSql {
    pub text: String,
    pub binds: Vec<SqlBind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "detail", rename_all = "snake_case")]
pub enum ActionDetail {
    None,
    Assign { target: Target, value: KExpr },
    Select { columns: Vec<KSql>, into: Vec<Target>, tail: KSql },
    Dml { sql: KSql },
    Cond { cond: KExpr },
    For { var: ElementId, lo: KExpr, hi: KExpr },
    Return { value: Option<KExpr> },
    Throw { exception: String },
    Call { callee: Callee, args: Vec<KExpr> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallableUnit {
    pub id: ElementId,
    pub name: String,
    pub origin: Origin,
    pub body: ElementId,
    pub ui_resource: Option<ElementId>,
    /// Screen of the window that owns a trigger.
    pub screen: Option<ElementId>,
    pub event: Option<String>,
    pub unit_kind: Option<UnitKind>,
    pub params: Vec<ElementId>,
    pub return_type: Option<PlsqlType>,
    pub stereotypes: Vec<String>,
    pub source_ref: SourceRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockUnit {
    pub id: ElementId,
    pub children: Vec<ElementId>,
    pub storable_units: Vec<ElementId>,
    pub source_ref: SourceRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatchUnit {
    pub id: ElementId,
    /// Exception names; `OTHERS` catches everything.
    pub exceptions: Vec<String>,
    pub children: Vec<ElementId>,
    pub source_ref: SourceRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionElement {
    pub id: ElementId,
    pub name: Stereotype,
    pub kind: String,
    pub children: Vec<ElementId>,
    pub reads: Vec<ElementId>,
    pub writes: Vec<ElementId>,
    pub calls: Vec<Callee>,
    pub detail: ActionDetail,
    pub source_ref: SourceRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorableUnit {
    pub id: ElementId,
    pub name: String,
    pub declared_type: Option<PlsqlType>,
    pub scope: Scope,
    pub role: StorableRole,
    pub init: Option<KExpr>,
    pub source_ref: Option<SourceRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub id: ElementId,
    pub name: String,
    /// Data block qualifying the window's items.
    pub block: String,
    pub resources: Vec<ElementId>,
    pub source_ref: SourceRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiResource {
    pub id: ElementId,
    pub name: String,
    pub widget: WidgetKind,
    pub screen: ElementId,
    pub source_ref: SourceRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Element {
    CallableUnit(CallableUnit),
    BlockUnit(BlockUnit),
    TryUnit(BlockUnit),
    CatchUnit(CatchUnit),
    ActionElement(ActionElement),
    StorableUnit(StorableUnit),
    Screen(Screen),
    #[serde(rename = "UIResource")]
    UiResource(UiResource),
}

impl Element {
    pub fn id(&self) -> ElementId {
        match self {
            Element::CallableUnit(e) => e.id,
            Element::BlockUnit(e) | Element::TryUnit(e) => e.id,
            Element::CatchUnit(e) => e.id,
            Element::ActionElement(e) => e.id,
            Element::StorableUnit(e) => e.id,
            Element::Screen(e) => e.id,
            Element::UiResource(e) => e.id,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Element::CallableUnit(_) => "CallableUnit",
            Element::BlockUnit(_) => "BlockUnit",
            Element::TryUnit(_) => "TryUnit",
            Element::CatchUnit(_) => "CatchUnit",
            Element::ActionElement(_) => "ActionElement",
            Element::StorableUnit(_) => "StorableUnit",
            Element::Screen(_) => "Screen",
            Element::UiResource(_) => "UIResource",
        }
    }

    /// Ordered code children (statements, nested blocks, catches).
    pub fn children(&self) -> &[ElementId] {
        match self {
            Element::BlockUnit(b) | Element::TryUnit(b) => &b.children,
            Element::CatchUnit(c) => &c.children,
            Element::ActionElement(a) => &a.children,
            _ => &[],
        }
    }

    pub fn source_ref(&self) -> Option<&SourceRef> {
        match self {
            Element::CallableUnit(e) => Some(&e.source_ref),
            Element::BlockUnit(e) | Element::TryUnit(e) => Some(&e.source_ref),
            Element::CatchUnit(e) => Some(&e.source_ref),
            Element::ActionElement(e) => Some(&e.source_ref),
            Element::StorableUnit(e) => e.source_ref.as_ref(),
            Element::Screen(e) => Some(&e.source_ref),
            Element::UiResource(e) => Some(&e.source_ref),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeModel {
    pub form_name: String,
    pub file: String,
    /// Full descriptor text; every [`SourceRef`] indexes into it.
    pub source: String,
    pub elements: Vec<Element>,
    pub roots: Vec<ElementId>,
    pub screens: Vec<ElementId>,
    pub globals: Vec<ElementId>,
}

impl CodeModel {
    pub fn get(&self, id: ElementId) -> Option<&Element> {
        self.elements.get(id.index())
    }

    pub fn element(&self, id: ElementId) -> &Element {
        &self.elements[id.index()]
    }

    pub fn callable(&self, id: ElementId) -> Option<&CallableUnit> {
        match self.get(id) {
            Some(Element::CallableUnit(c)) => Some(c),
            _ => None,
        }
    }

    pub fn action(&self, id: ElementId) -> Option<&ActionElement> {
        match self.get(id) {
            Some(Element::ActionElement(a)) => Some(a),
            _ => None,
        }
    }

    pub fn storable(&self, id: ElementId) -> Option<&StorableUnit> {
        match self.get(id) {
            Some(Element::StorableUnit(s)) => Some(s),
            _ => None,
        }
    }

    pub fn screen(&self, id: ElementId) -> Option<&Screen> {
        match self.get(id) {
            Some(Element::Screen(s)) => Some(s),
            _ => None,
        }
    }

    pub fn ui_resource(&self, id: ElementId) -> Option<&UiResource> {
        match self.get(id) {
            Some(Element::UiResource(u)) => Some(u),
            _ => None,
        }
    }

    pub fn callables(&self) -> impl Iterator<Item = &CallableUnit> {
        self.roots.iter().filter_map(|id| self.callable(*id))
    }

    /// Depth-first walk over the code elements below `id`, including `id`.
    pub fn walk(&self, id: ElementId, f: &mut dyn FnMut(&Element)) {
        let Some(e) = self.get(id) else { return };
        f(e);
        for c in e.children() {
            self.walk(*c, f);
        }
    }

    pub fn count_stereotype(&self, s: Stereotype) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::ActionElement(a) if a.name == s))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("code model serializes")
    }

    pub fn from_json(text: &str) -> Result<CodeModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}
