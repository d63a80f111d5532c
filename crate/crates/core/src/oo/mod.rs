//! Object-oriented model and the platform-to-classes transformation.

mod declare;
mod mapping;
mod model;
mod separate;

use std::collections::{BTreeMap, BTreeSet};

pub use declare::*;
pub use model::*;
pub use separate::*;

use crate::diagnostics::{codes, Diagnostic};
use crate::naming::{camel_case, lower_first, map_key, pascal_case, unique_name, upper_first};
use crate::platform::{MethodRef, ServiceKind, ServiceMethod, TargetPlatformModel};
use crate::primitives::*;
use mapping::{java_type, Context, Env, Hook, Mapper, Site, UnitInfo, Usage};

pub const MAP_TYPE: &str = "Map<String, Object>";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OoOptions {
    /// PL/SQL builtin (uppercase) to Java method name.
    pub builtins: BTreeMap<String, String>,
    /// PL/SQL type name (uppercase) to Java type.
    pub type_map: BTreeMap<String, String>,
}

pub struct OoResult {
    pub model: OOModel,
    /// Input platform model with every method reference filled in.
    pub platform: TargetPlatformModel,
    pub diagnostics: Vec<Diagnostic>,
    /// Primitive-level variable accesses of every generated handler method.
    pub accesses: Vec<VariableAccess>,
}

impl OoResult {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.is_error())
    }
}

pub fn platform_to_oo(platform: &TargetPlatformModel, root: &PrimitivesRoot) -> OoResult {
    platform_to_oo_with(platform, root, &OoOptions::default())
}

type Accesses = Vec<(VarId, AccessKind)>;

struct AccessCollector<'a> {
    unit_access: &'a BTreeMap<String, Accesses>,
    out: Accesses,
}

impl AccessCollector<'_> {
    fn push(&mut self, v: VarId, k: AccessKind) {
        self.out.push((v, k));
    }

    fn call(&mut self, code: &str) {
        if let Some(xs) = self.unit_access.get(code) {
            self.out.extend(xs.iter().copied());
        }
    }

    fn readable(&mut self, r: &Readable) {
        match r {
            Readable::Primitive(p) => self.primitive(p),
            Readable::ReturnValue { callee, args } => {
                args.iter().for_each(|a| self.readable(a));
                if let ProcRef::Code(c) = callee {
                    self.call(c);
                }
            }
            Readable::Condition(e) => self.expression(e),
            Readable::Constant(_) | Readable::Symbol(_) => {}
        }
    }

    fn expression(&mut self, e: &Expression) {
        match e {
            Expression::Binary { lhs, rhs, .. } => {
                self.expression(lhs);
                self.expression(rhs);
            }
            Expression::Not(x) => self.expression(x),
            Expression::Operand(r) => self.readable(r),
        }
    }

    fn sql(&mut self, s: &SqlText) {
        for a in &s.args {
            self.push(a.var, AccessKind::Read);
        }
    }

    fn primitives(&mut self, ps: &[Primitive]) {
        ps.iter().for_each(|p| self.primitive(p));
    }

    fn primitive(&mut self, p: &Primitive) {
        match &p.kind {
            PrimitiveKind::ReadFrom { var } | PrimitiveKind::ReadFromUI { var } => self.push(*var, AccessKind::Read),
            PrimitiveKind::WriteTo { var, inputs } | PrimitiveKind::WriteToUI { var, inputs } => {
                inputs.iter().for_each(|r| self.readable(r));
                self.push(*var, AccessKind::Write);
            }
            PrimitiveKind::ReadFromDB { columns, tail, into } => {
                columns.iter().for_each(|c| self.sql(c));
                self.sql(tail);
                for v in into {
                    self.push(*v, AccessKind::Write);
                }
            }
            PrimitiveKind::WriteToDB { sql, .. } => self.sql(sql),
            PrimitiveKind::ManipulateData { inputs, output_var, .. } => {
                inputs.iter().for_each(|r| self.readable(r));
                if let Some(v) = output_var {
                    self.push(*v, AccessKind::Write);
                }
            }
            PrimitiveKind::ModifyUI { args, .. }
            | PrimitiveKind::ShowMessage { args, .. }
            | PrimitiveKind::OpenView { args, .. } => args.iter().for_each(|r| self.readable(r)),
            PrimitiveKind::SelectionFlow { cases, .. } => {
                for c in cases {
                    if let Some(e) = &c.condition {
                        self.expression(e);
                    }
                    self.primitives(&c.body);
                }
            }
            PrimitiveKind::Loop { kind, condition, body } => {
                if let LoopKind::For { var, lo, hi } = kind {
                    self.readable(lo);
                    self.readable(hi);
                    self.push(*var, AccessKind::Write);
                }
                if let Some(e) = condition {
                    self.expression(e);
                }
                self.primitives(body);
            }
            PrimitiveKind::CallProcedure { callee, args } => {
                args.iter().for_each(|a| self.readable(a));
                if let ProcRef::Code(c) = callee {
                    self.call(c);
                }
            }
            PrimitiveKind::Return { value } => {
                if let Some(v) = value {
                    self.readable(v);
                }
            }
            PrimitiveKind::Try { body, catches } => {
                self.primitives(body);
                for c in catches {
                    self.primitives(&c.body);
                }
            }
            PrimitiveKind::Break | PrimitiveKind::Throw { .. } => {}
        }
    }
}

fn collect(prims: &[Primitive], unit_access: &BTreeMap<String, Accesses>) -> Accesses {
    let mut c = AccessCollector {
        unit_access,
        out: Vec::new(),
    };
    c.primitives(prims);
    c.out
}

/// UI and global accesses of each program unit, including the units it calls.
fn unit_accesses(root: &PrimitivesRoot) -> BTreeMap<String, Accesses> {
    let form_vars: BTreeSet<VarId> = root.variables.iter().map(|v| v.id).collect();
    let units: Vec<&Code> = root
        .codes
        .iter()
        .filter(|c| c.origin_kind == CodeOrigin::ProgramUnit)
        .collect();
    let mut result: BTreeMap<String, Accesses> = units.iter().map(|c| (c.id.clone(), Vec::new())).collect();
    loop {
        let mut changed = false;
        for c in &units {
            let mut seen = BTreeSet::new();
            let xs: Accesses = collect(&c.primitives, &result)
                .into_iter()
                .filter(|(v, _)| form_vars.contains(v))
                .filter(|x| seen.insert(*x))
                .collect();
            if result.get(&c.id) != Some(&xs) {
                result.insert(c.id.clone(), xs);
                changed = true;
            }
        }
        if !changed {
            return result;
        }
    }
}

fn units_called(prims: &[Primitive], root: &PrimitivesRoot, out: &mut BTreeSet<String>) {
    for p in prims {
        for c in p.called_codes() {
            if out.insert(c.clone()) {
                if let Some(code) = root.code(&c) {
                    units_called(&code.primitives, root, out);
                }
            }
        }
    }
}

fn method(name: &str, role: MethodRole, params: Vec<Param>, return_type: &str, body: Block) -> Method {
    Method {
        name: name.to_string(),
        role,
        visibility: "public".into(),
        params,
        return_type: return_type.to_string(),
        body,
        locals: Vec::new(),
        code: None,
    }
}

fn map_param() -> Vec<Param> {
    vec![Param {
        name: "map".into(),
        ty: MAP_TYPE.into(),
    }]
}

fn uses_map(b: &Block) -> bool {
    let mut found = false;
    b.visit_exprs(&mut |e| {
        if *e == OExpr::name("map") {
            found = true;
        }
    });
    found
}

fn db_helpers() -> Vec<Method> {
    let mut out = Vec::new();
    for (name, ret, finish) in [
        ("readFromDB", "Object", "getSingleResult"),
        ("writeToDB", "Integer", "executeUpdate"),
    ] {
        let mut body = Block::new(0);
        let mut each = Block::new(1);
        each.stmts = vec![
            Stmt::expr(OExpr::call(
                Some(OExpr::name("query")),
                "setParameter",
                vec![OExpr::name("position"), OExpr::name("arg")],
            )),
            Stmt::VariableAssign {
                target: "position".into(),
                value: OExpr::Binary {
                    op: "+".into(),
                    lhs: Box::new(OExpr::name("position")),
                    rhs: Box::new(OExpr::Literal("1".into())),
                },
            },
        ];
        body.stmts = vec![
            Stmt::VariableDeclaration {
                name: "em".into(),
                ty: "EntityManager".into(),
                init: Some(OExpr::call(Some(OExpr::name("emf")), "createEntityManager", Vec::new())),
                comment: None,
            },
            Stmt::VariableDeclaration {
                name: "query".into(),
                ty: "Query".into(),
                init: Some(OExpr::call(Some(OExpr::name("em")), "createNativeQuery", vec![OExpr::name("sql")])),
                comment: None,
            },
            Stmt::VariableDeclaration {
                name: "position".into(),
                ty: "int".into(),
                init: Some(OExpr::Literal("1".into())),
                comment: None,
            },
            Stmt::ForEach {
                var: "arg".into(),
                ty: "Object".into(),
                iterable: OExpr::name("args"),
                body: each,
            },
            Stmt::VariableDeclaration {
                name: "result".into(),
                ty: ret.into(),
                init: Some(OExpr::call(Some(OExpr::name("query")), finish, Vec::new())),
                comment: None,
            },
            Stmt::expr(OExpr::call(Some(OExpr::name("em")), "close", Vec::new())),
            Stmt::Return {
                value: Some(OExpr::name("result")),
            },
        ];
        let mut m = method(
            name,
            MethodRole::DbHelper,
            vec![
                Param {
                    name: "sql".into(),
                    ty: "String".into(),
                },
                Param {
                    name: "args".into(),
                    ty: "Object...".into(),
                },
            ],
            ret,
            body,
        );
        m.locals = vec![
            Param {
                name: "em".into(),
                ty: "EntityManager".into(),
            },
            Param {
                name: "query".into(),
                ty: "Query".into(),
            },
            Param {
                name: "position".into(),
                ty: "int".into(),
            },
            Param {
                name: "result".into(),
                ty: ret.into(),
            },
        ];
        out.push(m);
    }
    out
}

fn emf_attribute() -> Attribute {
    Attribute {
        name: "emf".into(),
        ty: "EntityManagerFactory".into(),
        annotations: Vec::new(),
        init: None,
    }
}

fn autowired(ty: &str) -> Attribute {
    Attribute {
        name: lower_first(ty),
        ty: ty.to_string(),
        annotations: vec!["@Autowired".into()],
        init: None,
    }
}

fn accessors(field: &str, ty: &str) -> Vec<Method> {
    let prop = upper_first(field);
    let mut get = Block::new(0);
    get.stmts.push(Stmt::Return {
        value: Some(OExpr::name(field)),
    });
    let mut set = Block::new(0);
    set.stmts.push(Stmt::expr(OExpr::Binary {
        op: "=".into(),
        lhs: Box::new(OExpr::name(&format!("this.{field}"))),
        rhs: Box::new(OExpr::name(field)),
    }));
    vec![
        method(&format!("get{prop}"), MethodRole::Accessor, Vec::new(), ty, get),
        method(
            &format!("set{prop}"),
            MethodRole::Accessor,
            vec![Param {
                name: field.to_string(),
                ty: ty.to_string(),
            }],
            "void",
            set,
        ),
    ]
}

fn ui_hook(h: &Hook) -> Method {
    let params = vec![if h.varargs {
        Param {
            name: "args".into(),
            ty: "Object...".into(),
        }
    } else {
        Param {
            name: "value".into(),
            ty: "Object".into(),
        }
    }];
    let mut body = Block::new(0);
    body.stmts.push(Stmt::Comment {
        text: "// Bound by the view layer".into(),
    });
    method(&h.name, MethodRole::UiHook, params, "void", body)
}

fn merge_usage(into: &mut Usage, from: Usage) {
    into.library.extend(from.library);
    into.constants.extend(from.constants);
    into.exceptions.extend(from.exceptions);
    for h in from.hooks {
        if !into.hooks.iter().any(|x| x.name == h.name) {
            into.hooks.push(h);
        }
    }
    into.db |= from.db;
    into.app |= from.app;
    into.diagnostics.extend(from.diagnostics);
}

/// Declares the `Local` sites of a finished method and reports reads before writes.
fn finish_method(
    m: &mut Method,
    locals: &[(String, String)],
    temps: Vec<Param>,
    diagnostics: &mut Vec<Diagnostic>,
    class: &str,
) {
    for name in declare_locals(m, locals) {
        diagnostics.push(Diagnostic::warning(
            codes::UNINITIALIZED_READ,
            format!("{class}.{}: `{name}` is read before it is assigned", m.name),
        ));
    }
    m.locals.extend(temps);
}

pub fn platform_to_oo_with(platform: &TargetPlatformModel, root: &PrimitivesRoot, opts: &OoOptions) -> OoResult {
    let mut platform = platform.clone();
    let mut diagnostics = Vec::new();
    let mut all_accesses = Vec::new();
    let mut usage_total = Usage::default();

    // Form-wide map keys.
    let mut reserved_keys = BTreeSet::new();
    let mut form_keys: BTreeMap<VarId, String> = BTreeMap::new();
    for kind in [VarKind::Ui, VarKind::Global] {
        for v in root.variables.iter().filter(|v| v.kind == kind) {
            form_keys.insert(v.id, unique_name(&map_key(&v.name), &mut reserved_keys));
        }
    }

    let app = platform.app_service().cloned();
    let app_attr = app.as_ref().map(|s| lower_first(&s.name));
    let mut units: BTreeMap<String, UnitInfo> = BTreeMap::new();
    let mut unit_names = BTreeSet::new();
    for code in root.codes.iter().filter(|c| c.origin_kind == CodeOrigin::ProgramUnit) {
        let mut param_keys = Vec::new();
        for p in &code.parameters {
            let name = code
                .local_variables
                .iter()
                .find(|v| v.id == *p)
                .map(|v| v.name.clone())
                .unwrap_or_else(|| p.to_string());
            let key = unique_name(&map_key(&name), &mut reserved_keys);
            form_keys.insert(*p, key.clone());
            param_keys.push(key);
        }
        units.insert(
            code.id.clone(),
            UnitInfo {
                method: unique_name(&camel_case(&code.name), &mut unit_names),
                param_keys,
                return_type: code.return_type.map(|t| java_type(opts, Some(t))),
            },
        );
    }
    let unit_access = unit_accesses(root);

    let form_sites = |v: &Variable| -> Site {
        let key = form_keys.get(&v.id).cloned().unwrap_or_else(|| map_key(&v.name));
        let cast = match v.kind {
            VarKind::Ui | VarKind::Global => Some("String".to_string()),
            _ => Some(java_type(opts, v.ty)),
        };
        Site::Map { key, cast }
    };

    let mut classes = Vec::new();
    let bean_count = platform.managed_beans.len();
    for bi in 0..bean_count {
        let bean = platform.managed_beans[bi].clone();
        let Some(controller) = platform.controller_of(&bean.id).cloned() else {
            diagnostics.push(Diagnostic::error(
                codes::OO_MAPPING,
                format!("managed bean {} has no controller service", bean.name),
            ));
            continue;
        };
        let controller_attr = lower_first(&controller.name);
        let mut bean_methods = Vec::new();
        let mut service_methods = Vec::new();
        let mut platform_methods = Vec::new();
        let mut bean_usage = Usage::default();
        let mut service_usage = Usage::default();
        let mut data_blocks: BTreeSet<String> = BTreeSet::new();
        data_blocks.insert(bean.block.clone());
        let object_names: BTreeMap<String, String> = root
            .variables
            .iter()
            .filter_map(|v| v.screen.clone())
            .chain(std::iter::once(bean.block.clone()))
            .map(|b| (b.clone(), camel_case(&b)))
            .collect();

        for (hi, handler) in bean.event_handlers.iter().enumerate() {
            let Some(code) = root.code(&handler.code) else {
                diagnostics.push(Diagnostic::error(
                    codes::OO_MAPPING,
                    format!("handler {} refers to missing code {}", handler.name, handler.code),
                ));
                continue;
            };
            let sep = separate_event_handler(&code.primitives);
            let step_name = |i: usize| format!("{}{}", handler.name, i);

            // Accesses in execution order, attributed to the generated methods.
            let mut order: Vec<(String, Accesses)> = Vec::new();
            for item in &sep.bean {
                match item {
                    BeanItem::ServiceCall(i) => {
                        order.push((step_name(*i), collect(&sep.services[i - 1], &unit_access)));
                    }
                    BeanItem::Ui(p) => order.push((handler.name.clone(), collect(std::slice::from_ref(p), &unit_access))),
                }
            }
            let records: Vec<VariableAccess> = order
                .iter()
                .flat_map(|(m, xs)| {
                    xs.iter().map(move |(v, k)| VariableAccess {
                        variable: v.to_string(),
                        kind: *k,
                        method: m.clone(),
                        block: None,
                        path: Vec::new(),
                    })
                })
                .collect();
            let shared = detect_shared_variables(&records);
            let mut called = BTreeSet::new();
            units_called(&code.primitives, root, &mut called);
            let via_units: BTreeSet<VarId> = called
                .iter()
                .filter_map(|c| unit_access.get(c))
                .flatten()
                .map(|(v, _)| *v)
                .collect();
            let in_service: BTreeSet<VarId> = order
                .iter()
                .filter(|(m, _)| *m != handler.name)
                .flat_map(|(_, xs)| xs.iter().map(|(v, _)| *v))
                .collect();

            // Sites.
            let mut taken: BTreeSet<String> = ["map".to_string(), controller_attr.clone()].into_iter().collect();
            taken.extend(app_attr.iter().cloned());
            taken.extend(object_names.values().cloned());
            let mut sites: BTreeMap<VarId, Site> = BTreeMap::new();
            let mut map_mode_ui = BTreeSet::new();
            for v in &root.variables {
                let site = match v.kind {
                    VarKind::Ui if !in_service.contains(&v.id) && !via_units.contains(&v.id) => {
                        let block = v.screen.clone().unwrap_or_else(|| bean.block.clone());
                        Site::Ui {
                            object: object_names.get(&block).cloned().unwrap_or_else(|| camel_case(&block)),
                            property: item_property(&v.name),
                        }
                    }
                    VarKind::Ui => {
                        map_mode_ui.insert(v.id);
                        form_sites(v)
                    }
                    _ => form_sites(v),
                };
                sites.insert(v.id, site);
            }
            let mut handler_keys = reserved_keys.clone();
            let mut locals: Vec<(String, String)> = Vec::new();
            for v in &code.local_variables {
                let site = if shared.contains(&v.id.to_string()) {
                    Site::Map {
                        key: unique_name(&map_key(&v.name), &mut handler_keys),
                        cast: Some(java_type(opts, v.ty)),
                    }
                } else if v.kind == VarKind::LoopIndex {
                    Site::LoopVar {
                        name: unique_name(&camel_case(&v.name), &mut taken),
                    }
                } else {
                    let name = unique_name(&camel_case(&v.name), &mut taken);
                    let ty = java_type(opts, v.ty);
                    locals.push((name.clone(), ty.clone()));
                    Site::Local { name, ty }
                };
                sites.insert(v.id, site);
            }

            let env = |context, method: String| Env {
                opts,
                units: &units,
                context,
                app_receiver: app_attr.clone(),
                db_receiver: (context == Context::Bean).then(|| controller_attr.clone()),
                block: bean.block.clone(),
                method,
            };

            // Service steps.
            for (i, prims) in sep.services.iter().enumerate() {
                let name = step_name(i + 1);
                let mut mapper = Mapper::new(env(Context::Service, name.clone()), sites.clone(), taken.clone());
                let body = mapper.block_of(prims);
                let mut m = method(&name, MethodRole::ServiceStep, map_param(), "void", body);
                m.code = Some(code.id.clone());
                let temps = std::mem::take(&mut mapper.temps);
                finish_method(&mut m, &locals, temps, &mut diagnostics, &controller.name);
                merge_usage(&mut service_usage, mapper.usage);
                service_methods.push(m);
                platform_methods.push(ServiceMethod::EventHandlerServiceMethod {
                    code: code.id.clone(),
                    handler: handler.id.clone(),
                    ordinal: (i + 1) as u32,
                    method: Some(MethodRef {
                        class: controller.name.clone(),
                        method: name,
                    }),
                });
            }

            // Bean method.
            let mut mapper = Mapper::new(env(Context::Bean, handler.name.clone()), sites.clone(), taken.clone());
            let mut body = mapper.new_block();
            let mut read_first = Vec::new();
            let mut written = Vec::new();
            for (_, xs) in &order {
                for (v, k) in xs {
                    let mapped = map_mode_ui.contains(v)
                        || root.variables.iter().any(|x| x.id == *v && x.kind == VarKind::Global);
                    if !mapped {
                        continue;
                    }
                    match k {
                        AccessKind::Read if !read_first.contains(v) => read_first.push(*v),
                        AccessKind::Write if !written.contains(v) => written.push(*v),
                        _ => {}
                    }
                }
            }
            let key_of = |v: &VarId| form_keys.get(v).cloned().unwrap_or_default();
            let var_of = |v: &VarId| root.variables.iter().find(|x| x.id == *v);
            for v in &read_first {
                let Some(var) = var_of(v) else { continue };
                let value = match var.kind {
                    VarKind::Global => {
                        mapper.usage.library.insert("getGlobal".into());
                        OExpr::call(None, "getGlobal", vec![OExpr::string(global_name(&var.name))])
                    }
                    _ => {
                        let block = var.screen.clone().unwrap_or_else(|| bean.block.clone());
                        data_blocks.insert(block.clone());
                        OExpr::call(
                            Some(OExpr::Name(object_names[&block].clone())),
                            &format!("get{}", item_property(&var.name)),
                            Vec::new(),
                        )
                    }
                };
                body.stmts.push(Stmt::expr(OExpr::map_put(&key_of(v), value)));
            }
            for item in &sep.bean {
                match item {
                    BeanItem::ServiceCall(i) => body.stmts.push(Stmt::expr(OExpr::call(
                        Some(OExpr::Name(controller_attr.clone())),
                        &step_name(*i),
                        vec![OExpr::name("map")],
                    ))),
                    BeanItem::Ui(p) => mapper.statement(p, &mut body.stmts),
                }
            }
            for v in &written {
                let Some(var) = var_of(v) else { continue };
                match var.kind {
                    VarKind::Global => {
                        mapper.usage.library.insert("setGlobal".into());
                        body.stmts.push(Stmt::expr(OExpr::call(
                            None,
                            "setGlobal",
                            vec![OExpr::string(global_name(&var.name)), OExpr::map_get(&key_of(v), None)],
                        )));
                    }
                    _ => {
                        let block = var.screen.clone().unwrap_or_else(|| bean.block.clone());
                        data_blocks.insert(block.clone());
                        body.stmts.push(Stmt::expr(OExpr::call(
                            Some(OExpr::Name(object_names[&block].clone())),
                            &format!("set{}", item_property(&var.name)),
                            vec![OExpr::call(
                                Some(OExpr::name("Objects")),
                                "toString",
                                vec![OExpr::map_get(&key_of(v), None), OExpr::Literal("null".into())],
                            )],
                        )));
                    }
                }
            }
            if uses_map(&body) {
                body.stmts.insert(
                    0,
                    Stmt::VariableDeclaration {
                        name: "map".into(),
                        ty: MAP_TYPE.into(),
                        init: Some(OExpr::New {
                            class: "HashMap<String, Object>".into(),
                            args: Vec::new(),
                        }),
                        comment: None,
                    },
                );
            }
            for site in mapper.sites.values() {
                if let Site::Ui { object, .. } = site {
                    let used = {
                        let mut u = false;
                        body.visit_exprs(&mut |e| u |= *e == OExpr::Name(object.clone()));
                        u
                    };
                    if used {
                        if let Some((b, _)) = object_names.iter().find(|(_, o)| *o == object) {
                            data_blocks.insert(b.clone());
                        }
                    }
                }
            }
            let mut m = method(&handler.name, MethodRole::EventHandler, Vec::new(), "void", body);
            m.code = Some(code.id.clone());
            let temps = std::mem::take(&mut mapper.temps);
            finish_method(&mut m, &locals, temps, &mut diagnostics, &bean.name);
            merge_usage(&mut bean_usage, mapper.usage);
            bean_methods.push(m);
            platform.managed_beans[bi].event_handlers[hi].method = Some(MethodRef {
                class: bean.name.clone(),
                method: handler.name.clone(),
            });
            all_accesses.extend(records);
        }

        // Bean class.
        let mut attributes = vec![autowired(&controller.name)];
        if bean_usage.app {
            if let Some(app) = &app {
                attributes.push(autowired(&app.name));
            }
        }
        let mut inner = Vec::new();
        let mut field_names: BTreeSet<String> = attributes.iter().map(|a| a.name.clone()).collect();
        for block in &data_blocks {
            let class = pascal_case(block);
            let object = object_names[block].clone();
            field_names.insert(object.clone());
            attributes.push(Attribute {
                name: object,
                ty: class.clone(),
                annotations: Vec::new(),
                init: Some(OExpr::New {
                    class: class.clone(),
                    args: Vec::new(),
                }),
            });
            let items: Vec<&Variable> = root
                .variables
                .iter()
                .filter(|v| v.kind == VarKind::Ui && v.screen.as_deref() == Some(block.as_str()))
                .collect();
            inner.push(ClassDecl {
                name: class,
                kind: ClassKind::DataObject,
                annotations: Vec::new(),
                attributes: items
                    .iter()
                    .map(|v| Attribute {
                        name: camel_case(&v.name),
                        ty: "String".into(),
                        annotations: Vec::new(),
                        init: None,
                    })
                    .collect(),
                methods: items.iter().flat_map(|v| accessors(&camel_case(&v.name), "String")).collect(),
                inner_classes: Vec::new(),
                source: None,
            });
        }
        let mut methods = bean_methods;
        for a in &bean.attributes {
            if field_names.insert(a.name.clone()) {
                attributes.push(Attribute {
                    name: a.name.clone(),
                    ty: "Object".into(),
                    annotations: Vec::new(),
                    init: None,
                });
                methods.extend(accessors(&a.name, "Object"));
            }
        }
        bean_usage.hooks.sort_by(|a, b| a.name.cmp(&b.name));
        for h in &bean_usage.hooks {
            methods.push(ui_hook(h));
        }
        let source = Some(format!("{} (lines {}-{})", platform.file, bean.lines.0, bean.lines.1));
        classes.push(ClassDecl {
            name: bean.name.clone(),
            kind: ClassKind::ManagedBean,
            annotations: Vec::new(),
            attributes,
            methods,
            inner_classes: inner,
            source,
        });

        // Controller class.
        let mut attributes = Vec::new();
        if service_usage.app {
            if let Some(app) = &app {
                attributes.push(autowired(&app.name));
            }
        }
        attributes.push(emf_attribute());
        service_methods.extend(db_helpers());
        classes.push(ClassDecl {
            name: controller.name.clone(),
            kind: ClassKind::ControllerService,
            annotations: vec!["@Service".into()],
            attributes,
            methods: service_methods,
            inner_classes: Vec::new(),
            source: Some(format!(
                "{} (lines {}-{})",
                platform.file, controller.lines.0, controller.lines.1
            )),
        });
        if let Some(s) = platform.services.iter_mut().find(|s| s.id == controller.id) {
            s.methods = platform_methods;
        }
        merge_usage(&mut usage_total, bean_usage);
        merge_usage(&mut usage_total, service_usage);
    }

    // APP service.
    if let Some(app) = &app {
        let mut methods = Vec::new();
        let mut app_usage = Usage::default();
        for code in root.codes.iter().filter(|c| c.origin_kind == CodeOrigin::ProgramUnit) {
            let info = &units[&code.id];
            let mut taken: BTreeSet<String> = ["map".to_string()].into_iter().collect();
            let mut sites: BTreeMap<VarId, Site> = root.variables.iter().map(|v| (v.id, form_sites(v))).collect();
            let mut locals = Vec::new();
            for v in &code.local_variables {
                let site = if code.parameters.contains(&v.id) {
                    form_sites(v)
                } else if v.kind == VarKind::LoopIndex {
                    Site::LoopVar {
                        name: unique_name(&camel_case(&v.name), &mut taken),
                    }
                } else {
                    let name = unique_name(&camel_case(&v.name), &mut taken);
                    let ty = java_type(opts, v.ty);
                    locals.push((name.clone(), ty.clone()));
                    Site::Local { name, ty }
                };
                sites.insert(v.id, site);
            }
            let env = Env {
                opts,
                units: &units,
                context: Context::App,
                app_receiver: None,
                db_receiver: None,
                block: String::new(),
                method: info.method.clone(),
            };
            let mut mapper = Mapper::new(env, sites, taken);
            let body = mapper.block_of(&code.primitives);
            let ret = info.return_type.clone().unwrap_or_else(|| "void".into());
            let mut m = method(&info.method, MethodRole::Helper, map_param(), &ret, body);
            m.code = Some(code.id.clone());
            let temps = std::mem::take(&mut mapper.temps);
            finish_method(&mut m, &locals, temps, &mut diagnostics, &app.name);
            merge_usage(&mut app_usage, mapper.usage);
            methods.push(m);
        }
        let mut attributes = Vec::new();
        if app_usage.db {
            attributes.push(emf_attribute());
            methods.extend(db_helpers());
        }
        classes.push(ClassDecl {
            name: app.name.clone(),
            kind: ClassKind::AppService,
            annotations: vec!["@Service".into()],
            attributes,
            methods,
            inner_classes: Vec::new(),
            source: Some(format!("{} (lines {}-{})", platform.file, app.lines.0, app.lines.1)),
        });
        if let Some(s) = platform.services.iter_mut().find(|s| s.kind == ServiceKind::App) {
            for sm in &mut s.methods {
                if let ServiceMethod::HelperServiceMethod { code, method } = sm {
                    *method = units.get(code.as_str()).map(|u| MethodRef {
                        class: app.name.clone(),
                        method: u.method.clone(),
                    });
                }
            }
        }
        merge_usage(&mut usage_total, app_usage);
    }

    diagnostics.append(&mut usage_total.diagnostics);
    let mut exceptions: BTreeSet<String> = usage_total.exceptions;
    exceptions.extend(root.exceptions.iter().map(|e| mapping::exception_class(&e.name)));
    exceptions.remove("Exception");
    OoResult {
        model: OOModel {
            form_name: root.form_name.clone(),
            package: root.form_name.to_lowercase(),
            classes,
            modules: Vec::new(),
            exceptions: exceptions.into_iter().collect(),
            library_calls: usage_total.library.into_iter().collect(),
            library_constants: usage_total.constants.into_iter().collect(),
        },
        platform,
        diagnostics,
        accesses: all_accesses,
    }
}

/// Accessor suffix of a data-object field.
fn item_property(item: &str) -> String {
    upper_first(&camel_case(item))
}

/// `GLOBAL.user_id` -> `user_id`.
fn global_name(name: &str) -> &str {
    name.split_once('.').map(|(_, n)| n).unwrap_or(name)
}
