//! Java source emission from the object-oriented model.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{codes, Diagnostic};
use crate::oo::*;
use crate::platform::TargetPlatformModel;

pub const TODO_ANNOTATION: &str = "/* TODO: PL/SQL Library Call */";
pub const TOOL: &str = "forms2mvc";
pub const LIBRARY_CLASS: &str = "PlsqlLibrary";

const INDENT: &str = "  ";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    /// Path relative to the form's source directory.
    pub path: String,
    pub content: String,
    /// Rendered event-handler bodies of a managed bean, by method name, used
    /// for skeleton merging.
    #[serde(default)]
    pub bodies: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFileSet {
    pub files: Vec<SourceFile>,
}

impl SourceFileSet {
    pub fn get(&self, path: &str) -> Option<&SourceFile> {
        self.files.iter().find(|f| f.path == path)
    }

    fn sort(&mut self) {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonFile {
    pub path: String,
    pub content: String,
}

pub struct Generation {
    pub files: SourceFileSet,
    pub diagnostics: Vec<Diagnostic>,
}

fn is_arithmetic(op: &str) -> bool {
    matches!(op, "+" | "-" | "*" | "/" | "%")
}

pub fn render_expr(e: &OExpr) -> String {
    expr(e, false)
}

fn expr(e: &OExpr, nested: bool) -> String {
    match e {
        OExpr::Literal(s) | OExpr::Name(s) => s.clone(),
        OExpr::Cast { ty, expr: inner } => {
            let x = expr(inner, true);
            match **inner {
                OExpr::Unary { .. } => format!("({ty})({x})"),
                _ => format!("({ty}){x}"),
            }
        }
        OExpr::Call {
            receiver,
            name,
            args,
            todo,
        } => {
            let mut out = String::new();
            if let Some(r) = receiver {
                let rs = expr(r, true);
                match **r {
                    OExpr::Cast { .. } | OExpr::Unary { .. } => out.push_str(&format!("({rs})")),
                    _ => out.push_str(&rs),
                }
                out.push('.');
            }
            out.push_str(name);
            out.push('(');
            out.push_str(&args.iter().map(|a| expr(a, false)).collect::<Vec<_>>().join(", "));
            out.push(')');
            if *todo {
                out.push_str(TODO_ANNOTATION);
            }
            out
        }
        OExpr::Binary { op, lhs, rhs } => {
            let s = format!("{} {op} {}", expr(lhs, true), expr(rhs, true));
            if is_arithmetic(op) || nested {
                format!("({s})")
            } else {
                s
            }
        }
        OExpr::Unary { op, operand } => {
            let x = expr(operand, true);
            if x.starts_with(['-', '+', '!']) && op != "!" || matches!(**operand, OExpr::Cast { .. }) {
                format!("{op}({x})")
            } else {
                format!("{op}{x}")
            }
        }
        OExpr::New { class, args } => format!(
            "new {class}({})",
            args.iter().map(|a| expr(a, false)).collect::<Vec<_>>().join(", ")
        ),
    }
}

struct Writer {
    out: String,
}

impl Writer {
    fn line(&mut self, depth: usize, text: &str) {
        if text.is_empty() {
            self.out.push('\n');
            return;
        }
        for _ in 0..depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn block(&mut self, depth: usize, b: &Block) {
        for s in &b.stmts {
            self.stmt(depth, s);
        }
    }

    fn if_chain(&mut self, depth: usize, cond: &OExpr, then: &Block, otherwise: &Option<Block>, head: &str) {
        self.line(depth, &format!("{head}if ({}) {{", render_expr(cond)));
        self.block(depth + 1, then);
        match otherwise {
            Some(b) if b.stmts.len() == 1 => {
                if let Stmt::If { cond, then, otherwise } = &b.stmts[0] {
                    return self.if_chain(depth, cond, then, otherwise, "} else ");
                }
                self.line(depth, "} else {");
                self.block(depth + 1, b);
                self.line(depth, "}");
            }
            Some(b) => {
                self.line(depth, "} else {");
                self.block(depth + 1, b);
                self.line(depth, "}");
            }
            None => self.line(depth, "}"),
        }
    }

    fn stmt(&mut self, depth: usize, s: &Stmt) {
        match s {
            Stmt::VariableDeclaration { name, ty, init, comment } => {
                let mut text = match init {
                    Some(v) => format!("{ty} {name} = {};", render_expr(v)),
                    None => format!("{ty} {name};"),
                };
                if let Some(c) = comment {
                    text.push(' ');
                    text.push_str(c);
                }
                self.line(depth, &text);
            }
            Stmt::VariableAssign { target, value } => self.line(depth, &format!("{target} = {};", render_expr(value))),
            Stmt::If { cond, then, otherwise } => self.if_chain(depth, cond, then, otherwise, ""),
            Stmt::Switch {
                selector,
                cases,
                default,
            } => {
                self.line(depth, &format!("switch ({}) {{", render_expr(selector)));
                for c in cases {
                    for l in &c.labels {
                        self.line(depth + 1, &format!("case {}:", render_expr(l)));
                    }
                    self.block(depth + 2, &c.body);
                    self.line(depth + 2, "break;");
                }
                if let Some(d) = default {
                    self.line(depth + 1, "default:");
                    self.block(depth + 2, d);
                }
                self.line(depth, "}");
            }
            Stmt::While { cond, body } => {
                self.line(depth, &format!("while ({}) {{", render_expr(cond)));
                self.block(depth + 1, body);
                self.line(depth, "}");
            }
            Stmt::For {
                var,
                ty,
                from,
                to,
                body,
            } => {
                self.line(
                    depth,
                    &format!(
                        "for ({ty} {var} = {}; {var} <= {}; {var}++) {{",
                        render_expr(from),
                        render_expr(to)
                    ),
                );
                self.block(depth + 1, body);
                self.line(depth, "}");
            }
            Stmt::ForEach { var, ty, iterable, body } => {
                self.line(depth, &format!("for ({ty} {var} : {}) {{", render_expr(iterable)));
                self.block(depth + 1, body);
                self.line(depth, "}");
            }
            Stmt::Try { body, catches } => {
                self.line(depth, "try {");
                self.block(depth + 1, body);
                for c in catches {
                    if let Stmt::Catch { types, var, body } = c {
                        self.line(depth, &format!("}} catch ({} {var}) {{", types.join(" | ")));
                        self.block(depth + 1, body);
                    }
                }
                self.line(depth, "}");
            }
            Stmt::Catch { types, var, body } => {
                self.line(depth, &format!("catch ({} {var}) {{", types.join(" | ")));
                self.block(depth + 1, body);
                self.line(depth, "}");
            }
            Stmt::Expression { expr } => self.line(depth, &format!("{};", render_expr(expr))),
            Stmt::Return { value: Some(v) } => self.line(depth, &format!("return {};", render_expr(v))),
            Stmt::Return { value: None } => self.line(depth, "return;"),
            Stmt::Throw { exception } => self.line(depth, &format!("throw new {exception}();")),
            Stmt::Break => self.line(depth, "break;"),
            Stmt::Comment { text } => self.line(depth, text),
        }
    }

    fn attribute(&mut self, depth: usize, a: &Attribute) {
        let mut text = String::new();
        for ann in &a.annotations {
            text.push_str(ann);
            text.push(' ');
        }
        text.push_str(&format!("private {} {}", a.ty, a.name));
        if let Some(init) = &a.init {
            text.push_str(&format!(" = {}", render_expr(init)));
        }
        text.push(';');
        self.line(depth, &text);
    }

    fn method(&mut self, depth: usize, m: &Method) {
        let params: Vec<String> = m.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
        self.line(
            depth,
            &format!("{} {} {}({}) {{", m.visibility, m.return_type, m.name, params.join(", ")),
        );
        self.block(depth + 1, &m.body);
        self.line(depth, "}");
    }

    fn class(&mut self, depth: usize, c: &ClassDecl, modifiers: &str) {
        for ann in &c.annotations {
            self.line(depth, ann);
        }
        self.line(depth, &format!("{modifiers}class {} {{", c.name));
        if !c.attributes.is_empty() {
            self.line(0, "");
            for a in &c.attributes {
                self.attribute(depth + 1, a);
            }
        }
        for inner in &c.inner_classes {
            self.line(0, "");
            self.class(depth + 1, inner, "public static ");
        }
        for m in &c.methods {
            self.line(0, "");
            self.method(depth + 1, m);
        }
        self.line(depth, "}");
    }
}

pub fn render_block(b: &Block, depth: usize) -> String {
    let mut w = Writer { out: String::new() };
    w.block(depth, b);
    w.out
}

/// Names a method body may use without declaring them.
fn scope_errors(class: &ClassDecl, oo: &OOModel, classes: &BTreeSet<String>) -> Vec<String> {
    let mut errors = Vec::new();
    let mut fields: BTreeSet<String> = class.attributes.iter().map(|a| a.name.clone()).collect();
    fields.extend(oo.library_constants.iter().cloned());
    fields.insert("Objects".into());
    fields.extend(classes.iter().cloned());
    for m in &class.methods {
        let mut scope = fields.clone();
        scope.extend(m.params.iter().map(|p| p.name.clone()));
        scope.extend(m.locals.iter().map(|p| p.name.clone()));
        m.body.visit(&mut |s| match s {
            Stmt::For { var, .. } | Stmt::ForEach { var, .. } | Stmt::Catch { var, .. } => {
                scope.insert(var.clone());
            }
            Stmt::VariableDeclaration { name, .. } => {
                scope.insert(name.clone());
            }
            _ => {}
        });
        let mut check = |name: &str| {
            let head = name.split('.').next().unwrap_or(name);
            if head != "this" && !scope.contains(head) {
                errors.push(format!("{}.{}: unresolved reference `{name}`", class.name, m.name));
            }
        };
        m.body.visit(&mut |s| {
            match s {
                Stmt::VariableAssign { target, .. } => check(target),
                Stmt::ForEach { .. } | Stmt::For { .. } | Stmt::Catch { .. } | Stmt::VariableDeclaration { .. } => {}
                _ => {}
            }
            for e in s.exprs() {
                e.visit(&mut |x| {
                    if let OExpr::Name(n) = x {
                        check(n);
                    }
                });
            }
        });
    }
    for inner in &class.inner_classes {
        errors.extend(scope_errors(inner, oo, classes));
    }
    errors
}

fn uses_call(class: &ClassDecl, names: &BTreeSet<String>) -> bool {
    let mut found = false;
    let mut visit = |c: &ClassDecl| {
        for m in &c.methods {
            m.body.visit_exprs(&mut |e| match e {
                OExpr::Call { receiver: None, name, .. } | OExpr::Name(name) if names.contains(name) => found = true,
                _ => {}
            });
        }
    };
    visit(class);
    class.inner_classes.iter().for_each(&mut visit);
    found
}

fn imports(class: &ClassDecl, oo: &OOModel) -> Vec<String> {
    let mut out = Vec::new();
    let mut types = BTreeSet::new();
    let mut collect = |c: &ClassDecl| {
        for m in &c.methods {
            for p in m.params.iter().chain(&m.locals) {
                types.insert(p.ty.clone());
            }
            m.body.visit(&mut |s| {
                if let Stmt::VariableDeclaration { ty, .. } = s {
                    types.insert(ty.clone());
                }
            });
            m.body.visit_exprs(&mut |e| match e {
                OExpr::New { class, .. } => {
                    types.insert(class.clone());
                }
                OExpr::Name(n) if n == "Objects" => {
                    types.insert("Objects".into());
                }
                _ => {}
            });
        }
        for a in &c.attributes {
            types.insert(a.ty.clone());
        }
    };
    collect(class);
    class.inner_classes.iter().for_each(&mut collect);
    let has = |t: &str| types.iter().any(|x| x.starts_with(t));
    if has("HashMap") {
        out.push("java.util.HashMap".to_string());
    }
    if has("Map<") {
        out.push("java.util.Map".to_string());
    }
    if has("Objects") {
        out.push("java.util.Objects".to_string());
    }
    if has("EntityManager") {
        out.push("javax.persistence.EntityManager".to_string());
    }
    if has("EntityManagerFactory") {
        out.push("javax.persistence.EntityManagerFactory".to_string());
    }
    if has("Query") {
        out.push("javax.persistence.Query".to_string());
    }
    if class.attributes.iter().any(|a| a.annotations.iter().any(|x| x == "@Autowired")) {
        out.push("org.springframework.beans.factory.annotation.Autowired".to_string());
    }
    if class.annotations.iter().any(|a| a == "@Service") {
        out.push("org.springframework.stereotype.Service".to_string());
    }
    out.sort();
    let library: BTreeSet<String> = oo.library_calls.iter().chain(&oo.library_constants).cloned().collect();
    if uses_call(class, &library) {
        out.push(format!("static {}.{LIBRARY_CLASS}.*", oo.package));
    }
    out
}

fn render_class(class: &ClassDecl, oo: &OOModel) -> String {
    let mut w = Writer { out: String::new() };
    match &class.source {
        Some(src) => w.line(0, &format!("// Generated by {TOOL} from {src}")),
        None => w.line(0, &format!("// Generated by {TOOL}")),
    }
    w.line(0, &format!("package {};", oo.package));
    w.line(0, "");
    let imports = imports(class, oo);
    for i in &imports {
        w.line(0, &format!("import {i};"));
    }
    if !imports.is_empty() {
        w.line(0, "");
    }
    w.class(0, class, "public ");
    w.out
}

/// Emits one file per class of `oo`.
pub fn generate(oo: &OOModel, platform: &TargetPlatformModel) -> Generation {
    let mut diagnostics = Vec::new();
    let mut files = SourceFileSet::default();
    let mut known: BTreeSet<String> = oo.classes.iter().map(|c| c.name.clone()).collect();
    known.extend(oo.exceptions.iter().cloned());
    for h in platform.event_handlers() {
        if h.method.is_none() {
            diagnostics.push(Diagnostic::error(
                codes::UNRESOLVED_REFERENCE,
                format!("event handler {} has no generated method", h.name),
            ));
        }
    }
    for s in &platform.services {
        for m in &s.methods {
            if m.method().is_none() {
                diagnostics.push(Diagnostic::error(
                    codes::UNRESOLVED_REFERENCE,
                    format!("service {} method for {} has no generated method", s.name, m.code()),
                ));
            }
        }
    }
    for class in &oo.classes {
        let errors = scope_errors(class, oo, &known);
        if !errors.is_empty() {
            for e in errors {
                diagnostics.push(Diagnostic::error(codes::UNRESOLVED_REFERENCE, e));
            }
            continue;
        }
        let bodies = if class.kind == ClassKind::ManagedBean {
            class
                .methods
                .iter()
                .filter(|m| m.role == MethodRole::EventHandler)
                .map(|m| (m.name.clone(), render_block(&m.body, 0)))
                .collect()
        } else {
            BTreeMap::new()
        };
        files.files.push(SourceFile {
            path: format!("{}.java", class.name),
            content: render_class(class, oo),
            bodies,
        });
    }
    files.sort();
    Generation { files, diagnostics }
}

/// Exception classes and the builtin stub library the generated classes rely on.
pub fn support_files(oo: &OOModel) -> SourceFileSet {
    let mut files = SourceFileSet::default();
    if oo.classes.is_empty() {
        return files;
    }
    for e in &oo.exceptions {
        let mut w = Writer { out: String::new() };
        w.line(0, &format!("// Generated by {TOOL}"));
        w.line(0, &format!("package {};", oo.package));
        w.line(0, "");
        w.line(0, &format!("public class {e} extends RuntimeException {{"));
        w.line(0, "");
        w.line(1, &format!("public {e}() {{"));
        w.line(2, "super();");
        w.line(1, "}");
        w.line(0, "}");
        files.files.push(SourceFile {
            path: format!("{e}.java"),
            content: w.out,
            bodies: BTreeMap::new(),
        });
    }

    let mut w = Writer { out: String::new() };
    w.line(0, &format!("// Generated by {TOOL}"));
    w.line(0, &format!("package {};", oo.package));
    w.line(0, "");
    w.line(0, "import java.util.HashMap;");
    w.line(0, "import java.util.Map;");
    w.line(0, "");
    w.line(0, &format!("public final class {LIBRARY_CLASS} {{"));
    w.line(0, "");
    w.line(1, "private static final Map<String, Object> GLOBALS = new HashMap<String, Object>();");
    for c in &oo.library_constants {
        w.line(1, &format!("public static final String {c} = \"{c}\";"));
    }
    w.line(0, "");
    w.line(1, &format!("private {LIBRARY_CLASS}() {{"));
    w.line(1, "}");
    for name in &oo.library_calls {
        w.line(0, "");
        match name.as_str() {
            "getGlobal" => {
                w.line(1, "public static String getGlobal(String name) {");
                w.line(2, "Object value = GLOBALS.get(name);");
                w.line(2, "return value == null ? null : value.toString();");
                w.line(1, "}");
            }
            "setGlobal" => {
                w.line(1, "public static void setGlobal(String name, Object value) {");
                w.line(2, "GLOBALS.put(name, value);");
                w.line(1, "}");
            }
            _ => {
                w.line(1, &format!("public static Object {name}(Object... args) {{"));
                w.line(2, &format!("throw new UnsupportedOperationException(\"{name}\");"));
                w.line(1, "}");
            }
        }
    }
    w.line(0, "}");
    files.files.push(SourceFile {
        path: format!("{LIBRARY_CLASS}.java"),
        content: w.out,
        bodies: BTreeMap::new(),
    });
    files.sort();
    files
}

pub const MARKER_PREFIX: &str = "// BODY:";

/// Splices bean method bodies into hand-written skeletons at `// BODY:<method>`
/// markers. Files without a skeleton pass through.
pub fn merge_into_skeleton(files: &SourceFileSet, skeletons: &[SkeletonFile]) -> Generation {
    let mut diagnostics = Vec::new();
    let mut out = SourceFileSet::default();
    for f in &files.files {
        let Some(sk) = skeletons.iter().find(|s| file_name(&s.path) == f.path) else {
            out.files.push(f.clone());
            continue;
        };
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut content = String::new();
        for line in sk.content.lines() {
            let trimmed = line.trim();
            let Some(name) = trimmed.strip_prefix(MARKER_PREFIX) else {
                content.push_str(line);
                content.push('\n');
                continue;
            };
            let name = name.trim().to_string();
            let count = seen.entry(name.clone()).or_default();
            *count += 1;
            if *count > 1 {
                diagnostics.push(Diagnostic::error(
                    codes::SKELETON_DUPLICATE_MARKER,
                    format!("{}: duplicate marker for {name}", sk.path),
                ));
                content.push_str(line);
                content.push('\n');
                continue;
            }
            match f.bodies.get(&name) {
                Some(body) => {
                    let indent = &line[..line.len() - line.trim_start().len()];
                    for b in body.lines() {
                        if b.is_empty() {
                            content.push('\n');
                        } else {
                            content.push_str(indent);
                            content.push_str(b);
                            content.push('\n');
                        }
                    }
                }
                None => {
                    diagnostics.push(Diagnostic::warning(
                        codes::SKELETON_UNUSED_MARKER,
                        format!("{}: no generated body for marker {name}", sk.path),
                    ));
                    content.push_str(line);
                    content.push('\n');
                }
            }
        }
        for name in f.bodies.keys() {
            if !seen.contains_key(name) {
                diagnostics.push(Diagnostic::error(
                    codes::SKELETON_MISSING_MARKER,
                    format!("{}: method {name} has no marker", sk.path),
                ));
            }
        }
        out.files.push(SourceFile {
            path: f.path.clone(),
            content,
            bodies: f.bodies.clone(),
        });
    }
    out.sort();
    Generation {
        files: out,
        diagnostics,
    }
}

fn file_name(path: &str) -> &str {
    path.rsplit(['/', '\\']).next().unwrap_or(path)
}
