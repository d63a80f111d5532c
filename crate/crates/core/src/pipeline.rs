//! The full chain from descriptor text to Java sources, with resumption from
//! dumped intermediate models.

use std::collections::BTreeMap;

use crate::codegen::{generate, merge_into_skeleton, support_files, SkeletonFile, SourceFileSet};
use crate::diagnostics::{codes, Diagnostic};
use crate::flowgraph::{build_flow, FlowGraph};
use crate::frontend::ast::FormBundle;
use crate::frontend::parse_form;
use crate::kdm::{inject, validate_code_model, CodeModel};
use crate::metrics::{coverage_check, measure, Artifacts, MetricsReport};
use crate::oo::{platform_to_oo_with, OOModel, OoOptions};
use crate::platform::{primitives_to_platform, TargetPlatformModel};
use crate::primitives::{kdm_to_primitives, PrimitivesRoot};

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub oo: OoOptions,
    pub skeletons: Vec<SkeletonFile>,
}

/// Models of one form; later stages are filled in by [`complete`].
#[derive(Debug, Clone)]
pub struct Models {
    pub kdm: CodeModel,
    pub primitives: Option<PrimitivesRoot>,
    pub platform: Option<TargetPlatformModel>,
    pub oo: Option<OOModel>,
}

pub struct Flow {
    /// `<Form>_<Window>_<Item>_<Event>`.
    pub name: String,
    pub graph: FlowGraph,
}

pub struct FormOutput {
    pub form: FormBundle,
    pub kdm: CodeModel,
    pub primitives: PrimitivesRoot,
    pub platform: TargetPlatformModel,
    pub oo: OOModel,
    /// One file per class.
    pub java: SourceFileSet,
    /// Exception classes and the builtin stub library.
    pub support: SourceFileSet,
    pub metrics: MetricsReport,
    pub flows: Vec<Flow>,
    pub diagnostics: Vec<Diagnostic>,
}

impl FormOutput {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.is_error())
    }
}

/// Parses and injects a descriptor. Parse failures are returned as a single error diagnostic.
pub fn to_kdm(text: &str, file: &str) -> Result<(CodeModel, Vec<Diagnostic>), Vec<Diagnostic>> {
    let form = parse_form(text).map_err(|e| vec![e.to_diagnostic(file)])?;
    let inj = inject(&form, text, file);
    let mut diagnostics = inj.diagnostics;
    diagnostics.extend(validate_code_model(&inj.model));
    Ok((inj.model, diagnostics))
}

pub fn run(text: &str, file: &str, opts: &PipelineOptions) -> Result<FormOutput, Vec<Diagnostic>> {
    let (kdm, diagnostics) = to_kdm(text, file)?;
    let models = Models {
        kdm,
        primitives: None,
        platform: None,
        oo: None,
    };
    let mut out = complete(models, opts)?;
    let mut all = diagnostics;
    all.append(&mut out.diagnostics);
    out.diagnostics = all;
    Ok(out)
}

/// Runs the stages missing from `models` and everything downstream.
pub fn complete(models: Models, opts: &PipelineOptions) -> Result<FormOutput, Vec<Diagnostic>> {
    let mut diagnostics = Vec::new();
    let kdm = models.kdm;
    let form = parse_form(&kdm.source).map_err(|e| vec![e.to_diagnostic(&kdm.file)])?;
    let primitives = match models.primitives {
        Some(p) => p,
        None => {
            let t = kdm_to_primitives(&kdm);
            diagnostics.extend(t.diagnostics);
            t.root
        }
    };
    let (platform, oo) = match (models.platform, models.oo) {
        (Some(platform), Some(oo)) => (platform, oo),
        (platform, _) => {
            let platform = match platform {
                Some(p) => p,
                None => {
                    let plan = primitives_to_platform(&primitives, &kdm);
                    diagnostics.extend(plan.diagnostics);
                    plan.model
                }
            };
            let r = platform_to_oo_with(&platform, &primitives, &opts.oo);
            diagnostics.extend(r.diagnostics);
            (r.platform, r.model)
        }
    };
    let generated = generate(&oo, &platform);
    diagnostics.extend(generated.diagnostics);
    let java = if opts.skeletons.is_empty() {
        generated.files
    } else {
        let merged = merge_into_skeleton(&generated.files, &opts.skeletons);
        diagnostics.extend(merged.diagnostics);
        merged.files
    };
    let support = support_files(&oo);
    let metrics = measure(&Artifacts {
        form: &form,
        kdm: &kdm,
        primitives: &primitives,
        platform: &platform,
        oo: &oo,
        java: &java,
    });
    diagnostics.extend(coverage_check(&metrics));
    let flows = flows(&kdm, &primitives, &platform);
    Ok(FormOutput {
        form,
        kdm,
        primitives,
        platform,
        oo,
        java,
        support,
        metrics,
        flows,
        diagnostics,
    })
}

fn flows(kdm: &CodeModel, root: &PrimitivesRoot, platform: &TargetPlatformModel) -> Vec<Flow> {
    let mut out = Vec::new();
    for bean in &platform.managed_beans {
        let view = platform.views.iter().find(|v| v.id == bean.view);
        for h in &bean.event_handlers {
            let Some(code) = root.code(&h.code) else { continue };
            let Some(unit) = kdm.callable(code.origin) else { continue };
            let item = view
                .and_then(|v| v.components.iter().find(|c| c.id == h.component))
                .map(|c| c.item.clone())
                .unwrap_or_else(|| unit.name.clone());
            let event = unit.event.clone().unwrap_or_default();
            let name = format!("{}_{}_{}_{}", root.form_name, bean.window, item, event);
            out.push(Flow {
                name: sanitize(&name),
                graph: build_flow(code, &format!("{item}.{event}"), Some(kdm)),
            });
        }
    }
    out
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

/// Reads a `name value` table; `#` starts a comment.
fn read_pairs(text: &str, file: &str) -> Result<Vec<(String, String)>, Diagnostic> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => out.push((a.to_string(), b.to_string())),
            _ => {
                return Err(Diagnostic::error(codes::CONFIG, "expected two columns").at(file, i as u32 + 1, 1));
            }
        }
    }
    Ok(out)
}

/// Builtin mapping file: `PLSQL_NAME javaName`, or `PLSQL_NAME TODO` to keep the
/// annotated library call.
pub fn parse_builtins(text: &str, file: &str) -> Result<BTreeMap<String, String>, Diagnostic> {
    Ok(read_pairs(text, file)?
        .into_iter()
        .filter(|(_, v)| v != "TODO")
        .map(|(k, v)| (k.to_uppercase(), v))
        .collect())
}

/// Type mapping file: `PLSQL_TYPE JavaType`.
pub fn parse_type_map(text: &str, file: &str) -> Result<BTreeMap<String, String>, Diagnostic> {
    const TYPES: [&str; 5] = ["VARCHAR2", "NUMBER", "INTEGER", "BOOLEAN", "DATE"];
    let mut out = BTreeMap::new();
    for (k, v) in read_pairs(text, file)? {
        let k = k.to_uppercase();
        if !TYPES.contains(&k.as_str()) {
            return Err(Diagnostic::error(codes::CONFIG, format!("unknown PL/SQL type `{k}`")).at(file, 0, 0));
        }
        out.insert(k, v);
    }
    Ok(out)
}
