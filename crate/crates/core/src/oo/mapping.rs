//! Primitive to statement mapping.

use std::collections::{BTreeMap, BTreeSet};

use super::model::*;
use super::OoOptions;
use crate::diagnostics::{codes, Diagnostic};
use crate::frontend::ast::{Literal, PlsqlType};
use crate::naming::{camel_case, pascal_case, unique_name};
use crate::primitives::*;

/// How a variable is reached from the method being generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Site {
    Local { name: String, ty: String },
    LoopVar { name: String },
    Map { key: String, cast: Option<String> },
    Ui { object: String, property: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Context {
    Bean,
    Service,
    App,
}

pub(crate) struct UnitInfo {
    pub method: String,
    pub param_keys: Vec<String>,
    pub return_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Hook {
    pub name: String,
    pub varargs: bool,
}

#[derive(Default)]
pub(crate) struct Usage {
    pub library: BTreeSet<String>,
    pub constants: BTreeSet<String>,
    pub exceptions: BTreeSet<String>,
    pub hooks: Vec<Hook>,
    pub db: bool,
    pub app: bool,
    pub diagnostics: Vec<Diagnostic>,
}

pub(crate) struct Env<'a> {
    pub opts: &'a OoOptions,
    pub units: &'a BTreeMap<String, UnitInfo>,
    pub context: Context,
    /// Attribute holding the APP service; `None` calls program units directly.
    pub app_receiver: Option<String>,
    /// Attribute holding the DB helpers; `None` calls them on `this`.
    pub db_receiver: Option<String>,
    /// Block qualifying unqualified item names in UI builtins.
    pub block: String,
    pub method: String,
}

pub(crate) struct Mapper<'a> {
    pub env: Env<'a>,
    pub sites: BTreeMap<VarId, Site>,
    pub taken: BTreeSet<String>,
    pub usage: Usage,
    /// Temporaries declared directly, with their types.
    pub temps: Vec<Param>,
    next_block: BlockId,
    catch_vars: Vec<String>,
}

pub(crate) fn java_type(opts: &OoOptions, ty: Option<PlsqlType>) -> String {
    let Some(ty) = ty else { return "Object".to_string() };
    if let Some(t) = opts.type_map.get(ty.as_str()) {
        return t.clone();
    }
    match ty {
        PlsqlType::Varchar2 => "String",
        PlsqlType::Number => "Double",
        PlsqlType::Integer => "Integer",
        PlsqlType::Boolean => "Boolean",
        PlsqlType::Date => "java.util.Date",
    }
    .to_string()
}

fn number_literal(text: &str) -> String {
    let integral = text.chars().all(|c| c.is_ascii_digit());
    if integral && text.parse::<i32>().is_err() {
        format!("{text}.0")
    } else {
        text.to_string()
    }
}

fn literal(l: &Literal) -> OExpr {
    match l {
        Literal::Number(n) => OExpr::Literal(number_literal(n)),
        Literal::String(s) => OExpr::string(s),
        Literal::Boolean(b) => OExpr::Literal(b.to_string()),
        Literal::Null => OExpr::Literal("null".into()),
    }
}

fn binary(op: &str, lhs: OExpr, rhs: OExpr) -> OExpr {
    OExpr::Binary {
        op: op.to_string(),
        lhs: Box::new(lhs),
        rhs: Box::new(rhs),
    }
}

fn is_null(e: &Expression) -> bool {
    matches!(e, Expression::Operand(Readable::Constant(Literal::Null)))
}

fn is_number(e: &Expression) -> bool {
    matches!(e, Expression::Operand(Readable::Constant(Literal::Number(_))))
        || matches!(e, Expression::Operand(Readable::Primitive(p)) if matches!(p.kind, PrimitiveKind::ManipulateData { op: DataOp::Add | DataOp::Sub | DataOp::Mul | DataOp::Div | DataOp::Neg, .. }))
}

pub(crate) fn exception_class(name: &str) -> String {
    if name.eq_ignore_ascii_case("OTHERS") {
        "Exception".to_string()
    } else {
        pascal_case(name)
    }
}

/// Number of program-unit calls evaluated by one statement-level primitive.
fn unit_calls(readables: &[&Readable], conditions: &[&Expression]) -> usize {
    let mut n = 0;
    let mut count = |r: &Readable| {
        if matches!(r, Readable::ReturnValue { callee: ProcRef::Code(_), .. }) {
            n += 1
        }
    };
    for r in readables {
        r.visit(&mut count);
    }
    for c in conditions {
        c.visit_readables(&mut count);
    }
    n
}

impl<'a> Mapper<'a> {
    pub fn new(env: Env<'a>, sites: BTreeMap<VarId, Site>, taken: BTreeSet<String>) -> Mapper<'a> {
        Mapper {
            env,
            sites,
            taken,
            usage: Usage::default(),
            temps: Vec::new(),
            next_block: 0,
            catch_vars: Vec::new(),
        }
    }

    pub fn new_block(&mut self) -> Block {
        let b = Block::new(self.next_block);
        self.next_block += 1;
        b
    }

    fn diag(&mut self, msg: String) {
        self.usage
            .diagnostics
            .push(Diagnostic::error(codes::OO_MAPPING, format!("{}: {msg}", self.env.method)));
    }

    pub fn block_of(&mut self, prims: &[Primitive]) -> Block {
        let mut b = self.new_block();
        for p in prims {
            self.statement(p, &mut b.stmts);
        }
        b
    }

    pub fn read(&mut self, v: VarId) -> OExpr {
        match self.sites.get(&v).cloned() {
            Some(Site::Local { name, .. }) | Some(Site::LoopVar { name }) => OExpr::Name(name),
            Some(Site::Map { key, cast }) => OExpr::map_get(&key, cast.as_deref()),
            Some(Site::Ui { object, property }) => {
                OExpr::call(Some(OExpr::Name(object)), &format!("get{property}"), Vec::new())
            }
            None => {
                self.diag(format!("variable {v} has no site"));
                OExpr::Literal("null".into())
            }
        }
    }

    pub fn write(&mut self, v: VarId, value: OExpr) -> Stmt {
        match self.sites.get(&v).cloned() {
            Some(Site::Local { name, ty }) => {
                let value = match value {
                    OExpr::Cast { expr, .. } if expr.as_map_get().is_some() => OExpr::Cast { ty, expr },
                    v => v,
                };
                Stmt::VariableAssign { target: name, value }
            }
            Some(Site::LoopVar { name }) => Stmt::VariableAssign { target: name, value },
            Some(Site::Map { key, .. }) => Stmt::expr(OExpr::map_put(&key, value)),
            Some(Site::Ui { object, property }) => Stmt::expr(OExpr::call(
                Some(OExpr::Name(object)),
                &format!("set{property}"),
                vec![value],
            )),
            None => {
                self.diag(format!("variable {v} has no site"));
                Stmt::Comment {
                    text: format!("// unresolved write to {v}"),
                }
            }
        }
    }

    fn temp(&mut self, ty: &str, value: OExpr, pre: &mut Vec<Stmt>) -> OExpr {
        let name = unique_name("result", &mut self.taken);
        self.temps.push(Param {
            name: name.clone(),
            ty: ty.to_string(),
        });
        pre.push(Stmt::VariableDeclaration {
            name: name.clone(),
            ty: ty.to_string(),
            init: Some(value),
            comment: None,
        });
        OExpr::Name(name)
    }

    fn unit_call(&mut self, code: &str, args: &[Readable], pre: &mut Vec<Stmt>, hoist: bool) -> OExpr {
        let Some(info) = self.env.units.get(code) else {
            self.diag(format!("call to unknown code {code}"));
            return OExpr::Literal("null".into());
        };
        let (method, keys, ret) = (info.method.clone(), info.param_keys.clone(), info.return_type.clone());
        if keys.len() != args.len() {
            self.diag(format!("{method} expects {} arguments, got {}", keys.len(), args.len()));
        }
        for (key, arg) in keys.iter().zip(args) {
            let value = self.readable(arg, pre, hoist);
            pre.push(Stmt::expr(OExpr::map_put(key, value)));
        }
        self.usage.app = true;
        let call = OExpr::call(
            self.env.app_receiver.clone().map(OExpr::Name),
            &method,
            vec![OExpr::name("map")],
        );
        if hoist {
            let ty = ret.unwrap_or_else(|| "Object".into());
            self.temp(&ty, call, pre)
        } else {
            call
        }
    }

    fn builtin_call(&mut self, name: &str, args: Vec<OExpr>) -> OExpr {
        if let Some(java) = self.env.opts.builtins.get(&name.to_uppercase()) {
            return OExpr::Call {
                receiver: None,
                name: java.clone(),
                args,
                todo: false,
            };
        }
        let java = camel_case(name);
        self.usage.library.insert(java.clone());
        OExpr::Call {
            receiver: None,
            name: java,
            args,
            todo: true,
        }
    }

    pub fn readable(&mut self, r: &Readable, pre: &mut Vec<Stmt>, hoist: bool) -> OExpr {
        match r {
            Readable::Primitive(p) => match &p.kind {
                PrimitiveKind::ReadFrom { var } | PrimitiveKind::ReadFromUI { var } => self.read(*var),
                PrimitiveKind::ManipulateData { op, inputs, .. } => {
                    let mut xs: Vec<OExpr> = inputs.iter().map(|i| self.readable(i, pre, hoist)).collect();
                    match (op, xs.len()) {
                        (DataOp::Neg, 1) => OExpr::Unary {
                            op: "-".into(),
                            operand: Box::new(xs.remove(0)),
                        },
                        (_, 2) => {
                            let rhs = xs.pop().unwrap();
                            let lhs = xs.pop().unwrap();
                            let sym = match op {
                                DataOp::Add | DataOp::Concat => "+",
                                DataOp::Sub => "-",
                                DataOp::Mul => "*",
                                DataOp::Div => "/",
                                DataOp::Neg => "-",
                            };
                            binary(sym, lhs, rhs)
                        }
                        _ => {
                            self.diag(format!("{op:?} with {} operands", xs.len()));
                            OExpr::Literal("null".into())
                        }
                    }
                }
                other => {
                    self.diag(format!("{} used as a value", other.name()));
                    OExpr::Literal("null".into())
                }
            },
            Readable::ReturnValue { callee, args } => match callee {
                ProcRef::Code(c) => self.unit_call(c, args, pre, hoist),
                ProcRef::Builtin(name) => {
                    let args = args.iter().map(|a| self.readable(a, pre, hoist)).collect();
                    self.builtin_call(name, args)
                }
            },
            Readable::Constant(l) => literal(l),
            Readable::Symbol(s) => match s.as_str() {
                "PROPERTY_TRUE" => OExpr::Literal("true".into()),
                "PROPERTY_FALSE" => OExpr::Literal("false".into()),
                _ => {
                    self.usage.constants.insert(s.clone());
                    OExpr::Name(s.clone())
                }
            },
            Readable::Condition(e) => self.expression(e, pre, hoist),
        }
    }

    pub fn expression(&mut self, e: &Expression, pre: &mut Vec<Stmt>, hoist: bool) -> OExpr {
        match e {
            Expression::Binary { op, lhs, rhs } => {
                if matches!(op, CondOp::Eq | CondOp::NotEq) && !is_null(lhs) && !is_null(rhs) && !is_number(lhs) && !is_number(rhs) {
                    let l = self.expression(lhs, pre, hoist);
                    let r = self.expression(rhs, pre, hoist);
                    let eq = OExpr::call(Some(OExpr::name("Objects")), "equals", vec![l, r]);
                    return if *op == CondOp::Eq {
                        eq
                    } else {
                        OExpr::Unary {
                            op: "!".into(),
                            operand: Box::new(eq),
                        }
                    };
                }
                let sym = match op {
                    CondOp::And => "&&",
                    CondOp::Or => "||",
                    CondOp::Less => "<",
                    CondOp::LessEq => "<=",
                    CondOp::Greater => ">",
                    CondOp::GreaterEq => ">=",
                    CondOp::Eq => "==",
                    CondOp::NotEq => "!=",
                };
                let l = self.expression(lhs, pre, hoist);
                let r = self.expression(rhs, pre, hoist);
                binary(sym, l, r)
            }
            Expression::Not(inner) => OExpr::Unary {
                op: "!".into(),
                operand: Box::new(self.expression(inner, pre, hoist)),
            },
            Expression::Operand(r) => self.readable(r, pre, hoist),
        }
    }

    fn sql(&mut self, parts: &[&SqlText]) -> (String, Vec<OExpr>) {
        let mut text = String::new();
        let mut args = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            let mut last = 0;
            for a in &part.args {
                text.push_str(&part.text[last..a.offset]);
                text.push('?');
                last = a.offset + a.len;
                args.push(self.read(a.var));
            }
            text.push_str(&part.text[last..]);
        }
        (text, args)
    }

    fn db_call(&mut self, name: &str, sql: String, mut args: Vec<OExpr>) -> OExpr {
        self.usage.db = true;
        args.insert(0, OExpr::string(&sql));
        OExpr::call(self.env.db_receiver.clone().map(OExpr::Name), name, args)
    }

    fn var_type(&self, v: VarId) -> Option<String> {
        match self.sites.get(&v) {
            Some(Site::Local { ty, .. }) => Some(ty.clone()),
            Some(Site::Ui { .. }) => Some("String".into()),
            _ => None,
        }
    }

    fn ui_statement(&mut self, builtin: &str, args: &[Readable], pre: &mut Vec<Stmt>) -> OExpr {
        if self.env.context != Context::Bean {
            let args = args.iter().map(|a| self.readable(a, pre, false)).collect();
            return self.builtin_call(builtin, args);
        }
        if builtin == "SET_ITEM_PROPERTY" && args.len() == 3 {
            let item = match &args[0] {
                Readable::Constant(Literal::String(s)) => Some(s.clone()),
                _ => None,
            };
            let prop = match &args[1] {
                Readable::Symbol(s) => Some(s.clone()),
                Readable::Constant(Literal::String(s)) => Some(s.clone()),
                _ => None,
            };
            if let (Some(item), Some(prop)) = (item, prop) {
                let (block, item) = match item.split_once('.') {
                    Some((b, i)) => (b.to_string(), i.to_string()),
                    None => (self.env.block.clone(), item),
                };
                let name = format!("set{}{}{}", pascal_case(&block), pascal_case(&item), pascal_case(&prop));
                let value = self.readable(&args[2], pre, false);
                self.hook(&name, false);
                return OExpr::call(None, &name, vec![value]);
            }
        }
        let name = camel_case(builtin);
        let args = args.iter().map(|a| self.readable(a, pre, false)).collect();
        self.hook(&name, true);
        OExpr::call(None, &name, args)
    }

    fn hook(&mut self, name: &str, varargs: bool) {
        if !self.usage.hooks.iter().any(|h| h.name == name) {
            self.usage.hooks.push(Hook {
                name: name.to_string(),
                varargs,
            });
        }
    }

    fn catch_var(&mut self) -> String {
        let mut taken: BTreeSet<String> = self.taken.clone();
        taken.extend(self.catch_vars.iter().cloned());
        let name = unique_name("e", &mut taken);
        self.catch_vars.push(name.clone());
        name
    }

    fn selection(&mut self, cases: &[Case], out: &mut Vec<Stmt>) {
        // Builds the chain from the last case so each condition's hoisted
        // statements run only when that condition is reached.
        let mut tail: Option<Block> = None;
        for (i, case) in cases.iter().enumerate().rev() {
            match &case.condition {
                None => {
                    tail = Some(self.block_of(&case.body));
                }
                Some(cond) => {
                    let mut pre = Vec::new();
                    let hoist = unit_calls(&[], &[cond]) > 1;
                    let c = self.expression(cond, &mut pre, hoist);
                    let then = self.block_of(&case.body);
                    let stmt = Stmt::If {
                        cond: c,
                        then,
                        otherwise: tail.take(),
                    };
                    if i == 0 {
                        out.extend(pre);
                        out.push(stmt);
                    } else {
                        let mut b = self.new_block();
                        b.stmts.extend(pre);
                        b.stmts.push(stmt);
                        tail = Some(b);
                    }
                }
            }
        }
        if let Some(orphan) = tail {
            // A chain without any condition: run the body unconditionally.
            out.extend(orphan.stmts);
        }
    }

    pub fn statement(&mut self, p: &Primitive, out: &mut Vec<Stmt>) {
        let hoist = unit_calls(&p.readables(), &[]) > 1;
        let mut pre = Vec::new();
        match &p.kind {
            PrimitiveKind::WriteTo { var, inputs } | PrimitiveKind::WriteToUI { var, inputs } => {
                let Some(input) = inputs.first() else {
                    self.diag("write without a value".into());
                    return;
                };
                let value = self.readable(input, &mut pre, hoist);
                let stmt = self.write(*var, value);
                out.extend(pre);
                out.push(stmt);
            }
            PrimitiveKind::ReadFromDB { columns, tail, into } => {
                if columns.len() != into.len() {
                    self.diag(format!("SELECT with {} columns into {} targets", columns.len(), into.len()));
                }
                for (col, target) in columns.iter().zip(into) {
                    let head = SqlText {
                        text: format!("SELECT {}", col.text),
                        args: col
                            .args
                            .iter()
                            .map(|a| SqlArg {
                                offset: a.offset + 7,
                                len: a.len,
                                var: a.var,
                            })
                            .collect(),
                    };
                    let (sql, args) = self.sql(&[&head, tail]);
                    let call = self.db_call("readFromDB", sql, args);
                    let value = match (self.sites.get(target), self.var_type(*target)) {
                        (Some(Site::Map { .. }), _) | (_, None) => call,
                        (_, Some(ty)) => OExpr::Cast {
                            ty,
                            expr: Box::new(call),
                        },
                    };
                    let stmt = self.write(*target, value);
                    out.push(stmt);
                }
            }
            PrimitiveKind::WriteToDB { sql, .. } => {
                let (text, args) = self.sql(&[sql]);
                let call = self.db_call("writeToDB", text, args);
                out.push(Stmt::expr(call));
            }
            PrimitiveKind::ReadFrom { .. } | PrimitiveKind::ReadFromUI { .. } => {
                self.diag(format!("{} as a statement", p.kind.name()));
            }
            PrimitiveKind::ManipulateData { output_var, .. } => {
                let value = self.readable(&Readable::Primitive(Box::new(p.clone())), &mut pre, hoist);
                out.extend(pre);
                match output_var {
                    Some(v) => {
                        let stmt = self.write(*v, value);
                        out.push(stmt);
                    }
                    None => out.push(Stmt::expr(value)),
                }
            }
            PrimitiveKind::ModifyUI { builtin, args } => {
                let call = self.ui_statement(builtin, args, &mut pre);
                out.extend(pre);
                out.push(Stmt::expr(call));
            }
            PrimitiveKind::SelectionFlow { cases, .. } => self.selection(cases, out),
            PrimitiveKind::Loop { kind, condition, body } => match kind {
                LoopKind::For { var, lo, hi } => {
                    let name = match self.sites.get(var) {
                        Some(Site::LoopVar { name }) => name.clone(),
                        _ => {
                            self.diag(format!("loop index {var} has no site"));
                            "i".into()
                        }
                    };
                    let hoist_bounds = unit_calls(&[lo, hi], &[]) > 0;
                    let from = self.readable(lo, &mut pre, hoist_bounds);
                    let to = self.readable(hi, &mut pre, hoist_bounds);
                    let body = self.block_of(body);
                    out.extend(pre);
                    out.push(Stmt::For {
                        var: name,
                        ty: "Integer".into(),
                        from,
                        to,
                        body,
                    });
                }
                LoopKind::While | LoopKind::Basic => {
                    let cond = match condition {
                        Some(c) => {
                            let hoist = unit_calls(&[], &[c]) > 1;
                            self.expression(c, &mut pre, hoist)
                        }
                        None => OExpr::Literal("true".into()),
                    };
                    let mut body = self.block_of(body);
                    // The condition is evaluated again after each iteration.
                    for s in &pre {
                        body.stmts.push(match s {
                            Stmt::VariableDeclaration { name, init: Some(v), .. } => Stmt::VariableAssign {
                                target: name.clone(),
                                value: v.clone(),
                            },
                            other => other.clone(),
                        });
                    }
                    out.extend(pre);
                    out.push(Stmt::While { cond, body });
                }
            },
            PrimitiveKind::Break => out.push(Stmt::Break),
            PrimitiveKind::CallProcedure { callee, args } => {
                let call = match callee {
                    ProcRef::Code(c) => self.unit_call(c, args, &mut pre, false),
                    ProcRef::Builtin(name) => {
                        let args = args.iter().map(|a| self.readable(a, &mut pre, hoist)).collect();
                        self.builtin_call(name, args)
                    }
                };
                out.extend(pre);
                out.push(Stmt::expr(call));
            }
            PrimitiveKind::Return { value } => {
                let v = value.as_ref().map(|v| self.readable(v, &mut pre, hoist));
                out.extend(pre);
                out.push(Stmt::Return { value: v });
            }
            PrimitiveKind::Try { body, catches } => {
                let body = self.block_of(body);
                let mut cs = Vec::new();
                for c in catches {
                    let mut types: Vec<String> = c.exceptions.iter().map(|e| exception_class(e)).collect();
                    if types.iter().any(|t| t == "Exception") {
                        types = vec!["Exception".into()];
                    }
                    for t in &types {
                        if t != "Exception" {
                            self.usage.exceptions.insert(t.clone());
                        }
                    }
                    let var = self.catch_var();
                    let body = self.block_of(&c.body);
                    self.catch_vars.pop();
                    cs.push(Stmt::Catch { types, var, body });
                }
                out.push(Stmt::Try { body, catches: cs });
            }
            PrimitiveKind::Throw { exception } => {
                let class = exception_class(exception);
                self.usage.exceptions.insert(class.clone());
                out.push(Stmt::Throw { exception: class });
            }
            PrimitiveKind::ShowMessage { builtin, args } | PrimitiveKind::OpenView { builtin, args } => {
                let args = args.iter().map(|a| self.readable(a, &mut pre, hoist)).collect();
                let call = self.builtin_call(builtin, args);
                out.extend(pre);
                out.push(Stmt::expr(call));
            }
        }
    }
}
