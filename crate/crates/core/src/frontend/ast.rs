//! Syntax tree for form descriptors and the supported PL/SQL subset.

use serde::{Deserialize, Serialize};

/// Byte range into the descriptor text plus the 1-based line/column of both ends.
/// `end` is exclusive; `end_line`/`end_col` describe the position of `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start,
            end: other.end,
            line: self.line,
            col: self.col,
            end_line: other.end_line,
            end_col: other.end_col,
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

/// An identifier with its original spelling. Lookups go through [`Ident::key`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn key(&self) -> String {
        self.name.to_uppercase()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormBundle {
    pub form_name: Ident,
    pub windows: Vec<Window>,
    pub program_units: Vec<ProgramUnit>,
    pub span: Span,
}

impl FormBundle {
    pub fn triggers(&self) -> impl Iterator<Item = (&Window, &Trigger)> {
        self.windows.iter().flat_map(|w| w.triggers.iter().map(move |t| (w, t)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum WidgetKind {
    Text,
    Button,
    Checkbox,
    Display,
}

impl WidgetKind {
    pub fn parse(word: &str) -> Option<WidgetKind> {
        match word.to_uppercase().as_str() {
            "TEXT" => Some(WidgetKind::Text),
            "BUTTON" => Some(WidgetKind::Button),
            "CHECKBOX" => Some(WidgetKind::Checkbox),
            "DISPLAY" => Some(WidgetKind::Display),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub name: Ident,
    /// Data block whose items this window shows. Bind variables may be
    /// qualified by either the window name or the block name.
    pub block: Option<Ident>,
    pub items: Vec<Item>,
    pub triggers: Vec<Trigger>,
    pub span: Span,
}

impl Window {
    /// Name used to qualify the window's items (`:BLOCK.ITEM`).
    pub fn block_name(&self) -> &Ident {
        self.block.as_ref().unwrap_or(&self.name)
    }

    pub fn item(&self, key: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.name.key() == key)
    }

    pub fn answers_to(&self, qualifier: &str) -> bool {
        self.name.key() == qualifier || self.block.as_ref().is_some_and(|b| b.key() == qualifier)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub name: Ident,
    pub widget: WidgetKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerOwner {
    /// Attached to an item of the window.
    Item,
    /// Attached to the window's data block rather than a widget.
    DataBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trigger {
    pub owner: Ident,
    pub owner_kind: TriggerOwner,
    pub event: Ident,
    pub body: PlSqlBlock,
    pub span: Span,
}

impl Trigger {
    pub fn owner_item(&self) -> Option<&Ident> {
        match self.owner_kind {
            TriggerOwner::Item => Some(&self.owner),
            TriggerOwner::DataBlock => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.body.statements.is_empty() && self.body.handlers.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum UnitKind {
    Function,
    Procedure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: Ident,
    pub ty: PlsqlType,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramUnit {
    pub kind: UnitKind,
    pub name: Ident,
    pub params: Vec<Param>,
    pub return_type: Option<PlsqlType>,
    pub body: PlSqlBlock,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PlsqlType {
    Varchar2,
    Number,
    Integer,
    Boolean,
    Date,
}

impl PlsqlType {
    pub fn parse(word: &str) -> Option<PlsqlType> {
        match word.to_uppercase().as_str() {
            "VARCHAR2" | "VARCHAR" | "CHAR" => Some(PlsqlType::Varchar2),
            "NUMBER" => Some(PlsqlType::Number),
            "INTEGER" | "PLS_INTEGER" | "BINARY_INTEGER" => Some(PlsqlType::Integer),
            "BOOLEAN" => Some(PlsqlType::Boolean),
            "DATE" => Some(PlsqlType::Date),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PlsqlType::Varchar2 => "VARCHAR2",
            PlsqlType::Number => "NUMBER",
            PlsqlType::Integer => "INTEGER",
            PlsqlType::Boolean => "BOOLEAN",
            PlsqlType::Date => "DATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Declaration {
    pub name: Ident,
    pub ty: PlsqlType,
    pub constant: bool,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExceptionName {
    Others,
    Named(Ident),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionHandler {
    pub exceptions: Vec<ExceptionName>,
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlSqlBlock {
    pub declarations: Vec<Declaration>,
    pub statements: Vec<Statement>,
    pub handlers: Vec<ExceptionHandler>,
    pub span: Span,
}

/// `:BLOCK.ITEM`. Unqualified binds are completed with the enclosing window's block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindRef {
    pub block: Ident,
    pub item: Ident,
    pub qualified: bool,
}

impl BindRef {
    pub fn is_global(&self) -> bool {
        matches!(self.block.key().as_str(), "GLOBAL" | "SYSTEM")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AssignTarget {
    Var(Ident),
    Bind(BindRef),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqlRefTarget {
    Bind(BindRef),
    /// An identifier in a value position. It becomes a bind if it names a
    /// PL/SQL variable in scope, otherwise it is a column.
    Ident(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlRef {
    /// Byte offset of the reference within [`SqlFragment::text`].
    pub offset: usize,
    pub len: usize,
    pub target: SqlRefTarget,
}

/// Raw SQL text kept byte-exact, plus the references found inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlFragment {
    pub text: String,
    pub span: Span,
    pub refs: Vec<SqlRef>,
}

impl SqlFragment {
    pub fn binds(&self) -> impl Iterator<Item = &BindRef> {
        self.refs.iter().filter_map(|r| match &r.target {
            SqlRefTarget::Bind(b) => Some(b),
            SqlRefTarget::Ident(_) => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DmlKind {
    Insert,
    Update,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondBranch {
    pub cond: Expr,
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElseBranch {
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StatementKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StatementKind {
    Assign {
        target: AssignTarget,
        value: Expr,
    },
    If {
        branches: Vec<CondBranch>,
        else_branch: Option<ElseBranch>,
    },
    Case {
        selector: Option<Expr>,
        whens: Vec<CondBranch>,
        else_branch: Option<ElseBranch>,
    },
    While {
        cond: Expr,
        body: Vec<Statement>,
    },
    For {
        var: Ident,
        lo: Expr,
        hi: Expr,
        body: Vec<Statement>,
    },
    BasicLoop {
        body: Vec<Statement>,
    },
    Exit {
        when: Option<Expr>,
    },
    Return {
        value: Option<Expr>,
    },
    Raise {
        exception: Ident,
    },
    Call {
        name: Ident,
        args: Vec<Expr>,
    },
    SelectInto {
        columns: Vec<SqlFragment>,
        into: Vec<AssignTarget>,
        tail: SqlFragment,
    },
    Dml {
        kind: DmlKind,
        sql: SqlFragment,
    },
    InnerBlock(PlSqlBlock),
}

impl StatementKind {
    pub fn name(&self) -> &'static str {
        match self {
            StatementKind::Assign { .. } => "Assign",
            StatementKind::If { .. } => "If",
            StatementKind::Case { .. } => "Case",
            StatementKind::While { .. } => "While",
            StatementKind::For { .. } => "For",
            StatementKind::BasicLoop { .. } => "BasicLoop",
            StatementKind::Exit { .. } => "Exit",
            StatementKind::Return { .. } => "Return",
            StatementKind::Raise { .. } => "Raise",
            StatementKind::Call { .. } => "Call",
            StatementKind::SelectInto { .. } => "SelectInto",
            StatementKind::Dml { .. } => "Dml",
            StatementKind::InnerBlock(_) => "InnerBlock",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Concat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Literal {
    Number(String),
    String(String),
    Boolean(bool),
    Null,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExprKind {
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnOp,
        operand: Box<Expr>,
    },
    Literal(Literal),
    Var(Ident),
    Bind(BindRef),
    Call {
        name: Ident,
        args: Vec<Expr>,
    },
}

/// Visits every statement of a statement list, depth first, in document order.
pub fn walk_statements<'a>(stmts: &'a [Statement], f: &mut dyn FnMut(&'a Statement)) {
    for s in stmts {
        f(s);
        match &s.kind {
            StatementKind::If { branches, else_branch } | StatementKind::Case { whens: branches, else_branch, .. } => {
                for b in branches {
                    walk_statements(&b.statements, f);
                }
                if let Some(e) = else_branch {
                    walk_statements(&e.statements, f);
                }
            }
            StatementKind::While { body, .. } | StatementKind::For { body, .. } | StatementKind::BasicLoop { body } => {
                walk_statements(body, f)
            }
            StatementKind::InnerBlock(b) => walk_block(b, f),
            _ => {}
        }
    }
}

pub fn walk_block<'a>(block: &'a PlSqlBlock, f: &mut dyn FnMut(&'a Statement)) {
    walk_statements(&block.statements, f);
    for h in &block.handlers {
        walk_statements(&h.statements, f);
    }
}
