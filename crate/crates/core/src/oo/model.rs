use serde::{Deserialize, Serialize};

pub type BlockId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: BlockId,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OExpr {
    /// Java literal text, e.g. `256`, `"x"`, `null`.
    Literal(String),
    Name(String),
    Cast {
        ty: String,
        expr: Box<OExpr>,
    },
    Call {
        receiver: Option<Box<OExpr>>,
        name: String,
        args: Vec<OExpr>,
        /// Unmapped PL/SQL builtin left for manual migration.
        todo: bool,
    },
    Binary {
        op: String,
        lhs: Box<OExpr>,
        rhs: Box<OExpr>,
    },
    Unary {
        op: String,
        operand: Box<OExpr>,
    },
    New {
        class: String,
        args: Vec<OExpr>,
    },
}

impl OExpr {
    pub fn name(n: &str) -> OExpr {
        OExpr::Name(n.to_string())
    }

    pub fn string(s: &str) -> OExpr {
        let mut out = String::from("\"");
        for c in s.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\r' => out.push_str("\\r"),
                '\t' => out.push_str("\\t"),
                c => out.push(c),
            }
        }
        out.push('"');
        OExpr::Literal(out)
    }

    pub fn call(receiver: Option<OExpr>, name: &str, args: Vec<OExpr>) -> OExpr {
        OExpr::Call {
            receiver: receiver.map(Box::new),
            name: name.to_string(),
            args,
            todo: false,
        }
    }

    pub fn map_get(key: &str, cast: Option<&str>) -> OExpr {
        let get = OExpr::call(Some(OExpr::name("map")), "get", vec![OExpr::string(key)]);
        match cast {
            Some(ty) => OExpr::Cast {
                ty: ty.to_string(),
                expr: Box::new(get),
            },
            None => get,
        }
    }

    pub fn map_put(key: &str, value: OExpr) -> OExpr {
        OExpr::call(Some(OExpr::name("map")), "put", vec![OExpr::string(key), value])
    }

    /// Map key if this is `map.get("k")`, possibly under a cast.
    pub fn as_map_get(&self) -> Option<&str> {
        match self {
            OExpr::Cast { expr, .. } => expr.as_map_get(),
            OExpr::Call { receiver: Some(r), name, args, .. } if name == "get" && **r == OExpr::name("map") => {
                match args.first() {
                    Some(OExpr::Literal(k)) => Some(&k[1..k.len() - 1]),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn visit(&self, f: &mut dyn FnMut(&OExpr)) {
        f(self);
        match self {
            OExpr::Cast { expr, .. } => expr.visit(f),
            OExpr::Call { receiver, args, .. } => {
                if let Some(r) = receiver {
                    r.visit(f);
                }
                args.iter().for_each(|a| a.visit(f));
            }
            OExpr::Binary { lhs, rhs, .. } => {
                lhs.visit(f);
                rhs.visit(f);
            }
            OExpr::Unary { operand, .. } => operand.visit(f),
            OExpr::New { args, .. } => args.iter().for_each(|a| a.visit(f)),
            OExpr::Literal(_) | OExpr::Name(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchCase {
    pub labels: Vec<OExpr>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stmt")]
pub enum Stmt {
    VariableDeclaration {
        name: String,
        ty: String,
        init: Option<OExpr>,
        comment: Option<String>,
    },
    VariableAssign {
        target: String,
        value: OExpr,
    },
    If {
        cond: OExpr,
        then: Block,
        otherwise: Option<Block>,
    },
    Switch {
        selector: OExpr,
        cases: Vec<SwitchCase>,
        default: Option<Block>,
    },
    While {
        cond: OExpr,
        body: Block,
    },
    For {
        var: String,
        ty: String,
        from: OExpr,
        to: OExpr,
        body: Block,
    },
    ForEach {
        var: String,
        ty: String,
        iterable: OExpr,
        body: Block,
    },
    Try {
        body: Block,
        catches: Vec<Stmt>,
    },
    Catch {
        types: Vec<String>,
        var: String,
        body: Block,
    },
    Expression {
        expr: OExpr,
    },
    Return {
        value: Option<OExpr>,
    },
    Throw {
        exception: String,
    },
    Break,
    Comment {
        text: String,
    },
}

impl Stmt {
    pub fn expr(e: OExpr) -> Stmt {
        Stmt::Expression { expr: e }
    }

    /// Child blocks in source order.
    pub fn blocks(&self) -> Vec<&Block> {
        match self {
            Stmt::If { then, otherwise, .. } => {
                let mut v = vec![then];
                v.extend(otherwise);
                v
            }
            Stmt::Switch { cases, default, .. } => {
                let mut v: Vec<&Block> = cases.iter().map(|c| &c.body).collect();
                v.extend(default);
                v
            }
            Stmt::While { body, .. } | Stmt::For { body, .. } | Stmt::ForEach { body, .. } | Stmt::Catch { body, .. } => {
                vec![body]
            }
            Stmt::Try { body, catches } => {
                let mut v = vec![body];
                for c in catches {
                    v.extend(c.blocks());
                }
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Block> {
        match self {
            Stmt::If { then, otherwise, .. } => {
                let mut v = vec![then];
                v.extend(otherwise.as_mut());
                v
            }
            Stmt::Switch { cases, default, .. } => {
                let mut v: Vec<&mut Block> = cases.iter_mut().map(|c| &mut c.body).collect();
                v.extend(default.as_mut());
                v
            }
            Stmt::While { body, .. } | Stmt::For { body, .. } | Stmt::ForEach { body, .. } | Stmt::Catch { body, .. } => {
                vec![body]
            }
            Stmt::Try { body, catches } => {
                let mut v = vec![body];
                for c in catches {
                    v.extend(c.blocks_mut());
                }
                v
            }
            _ => Vec::new(),
        }
    }

    /// Expressions evaluated by this statement itself, in evaluation order.
    pub fn exprs(&self) -> Vec<&OExpr> {
        match self {
            Stmt::VariableDeclaration { init: Some(e), .. } => vec![e],
            Stmt::VariableAssign { value, .. } => vec![value],
            Stmt::If { cond, .. } | Stmt::While { cond, .. } => vec![cond],
            Stmt::Switch { selector, cases, .. } => {
                let mut v = vec![selector];
                for c in cases {
                    v.extend(&c.labels);
                }
                v
            }
            Stmt::For { from, to, .. } => vec![from, to],
            Stmt::ForEach { iterable, .. } => vec![iterable],
            Stmt::Expression { expr } => vec![expr],
            Stmt::Return { value: Some(v) } => vec![v],
            _ => Vec::new(),
        }
    }

    pub fn is_container(&self) -> bool {
        !self.blocks().is_empty() || matches!(self, Stmt::Try { .. })
    }
}

impl Block {
    pub fn new(id: BlockId) -> Block {
        Block { id, stmts: Vec::new() }
    }

    /// Visits every statement in this block and below, depth first.
    pub fn visit(&self, f: &mut dyn FnMut(&Stmt)) {
        for s in &self.stmts {
            f(s);
            for b in s.blocks() {
                b.visit(f);
            }
        }
    }

    pub fn visit_exprs(&self, f: &mut dyn FnMut(&OExpr)) {
        self.visit(&mut |s| {
            for e in s.exprs() {
                e.visit(f);
            }
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodRole {
    /// Managed-bean method of one trigger.
    EventHandler,
    /// Numbered controller-service method split from a trigger.
    ServiceStep,
    /// APP-service method migrated from a program unit.
    Helper,
    DbHelper,
    Accessor,
    /// Setter or action expected from the UI layer.
    UiHook,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    pub name: String,
    pub role: MethodRole,
    pub visibility: String,
    pub params: Vec<Param>,
    pub return_type: String,
    pub body: Block,
    pub locals: Vec<Param>,
    /// Primitives code this method was built from.
    pub code: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub ty: String,
    pub annotations: Vec<String>,
    pub init: Option<OExpr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    ManagedBean,
    ControllerService,
    AppService,
    /// Nested holder of one data block's item values.
    DataObject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecl {
    pub name: String,
    pub kind: ClassKind,
    pub annotations: Vec<String>,
    pub attributes: Vec<Attribute>,
    pub methods: Vec<Method>,
    pub inner_classes: Vec<ClassDecl>,
    /// Descriptor file and line range the class was migrated from.
    pub source: Option<String>,
}

impl ClassDecl {
    pub fn method(&self, name: &str) -> Option<&Method> {
        self.methods.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OOModel {
    pub form_name: String,
    pub package: String,
    pub classes: Vec<ClassDecl>,
    pub modules: Vec<String>,
    /// Exception classes to generate, as Java class names.
    pub exceptions: Vec<String>,
    /// Builtins called without a Java mapping.
    pub library_calls: Vec<String>,
    /// Forms constants referenced by name.
    pub library_constants: Vec<String>,
}

impl OOModel {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("oo serialize")
    }

    pub fn from_json(text: &str) -> Result<OOModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Number of `readFromDB`/`writeToDB` calls outside the injected helpers.
pub fn count_db_calls(class: &ClassDecl) -> usize {
    let mut n = 0;
    for m in class.methods.iter().filter(|m| m.role != MethodRole::DbHelper) {
        m.body.visit_exprs(&mut |e| {
            if let OExpr::Call { name, .. } = e {
                if name == "readFromDB" || name == "writeToDB" {
                    n += 1;
                }
            }
        });
    }
    n
}
