//! Per-stage trigger, program-unit and SQL counts, and the conservation checks
//! between stages.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::codegen::SourceFileSet;
use crate::diagnostics::{codes, Diagnostic};
use crate::frontend::ast::{walk_block, FormBundle, PlSqlBlock, StatementKind, Trigger, TriggerOwner};
use crate::kdm::{CodeModel, Element, Origin};
use crate::oo::{count_db_calls, MethodRole, OOModel};
use crate::platform::{ServiceKind, TargetPlatformModel};
use crate::primitives::{CodeOrigin, Primitive, PrimitiveKind, PrimitivesRoot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Forms,
    Kdm,
    Primitives,
    Platform,
    Oo,
    Java,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Forms,
        Stage::Kdm,
        Stage::Primitives,
        Stage::Platform,
        Stage::Oo,
        Stage::Java,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Forms => "forms",
            Stage::Kdm => "kdm",
            Stage::Primitives => "primitives",
            Stage::Platform => "platform",
            Stage::Oo => "oo",
            Stage::Java => "java",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub stage: Stage,
    pub triggers: usize,
    pub program_units: usize,
    pub sql_statements: usize,
    pub skipped_data_block_triggers: usize,
    pub empty_triggers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub form_name: String,
    pub stages: Vec<StageMetrics>,
    /// Σ over migrated SELECT INTO statements of (targets − 1).
    pub select_into_extra: usize,
    /// SQL statements inside skipped triggers.
    pub skipped_sql_statements: usize,
}

impl MetricsReport {
    pub fn stage(&self, stage: Stage) -> &StageMetrics {
        self.stages.iter().find(|s| s.stage == stage).expect("all stages present")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }

    /// Aligned table with one column per stage.
    pub fn to_table(&self) -> String {
        let rows: [(&str, fn(&StageMetrics) -> usize); 5] = [
            ("Triggers", |s| s.triggers),
            ("Program units", |s| s.program_units),
            ("SQL statements", |s| s.sql_statements),
            ("Data-block triggers", |s| s.skipped_data_block_triggers),
            ("Empty triggers", |s| s.empty_triggers),
        ];
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.form_name);
        let _ = write!(out, "{:<20}", "");
        for s in &self.stages {
            let _ = write!(out, " {:>10}", s.stage.as_str());
        }
        out.push('\n');
        for (label, get) in rows {
            let _ = write!(out, "{label:<20}");
            for s in &self.stages {
                let _ = write!(out, " {:>10}", get(s));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "{:<20} {:>10}", "SELECT INTO extra", self.select_into_extra);
        let _ = writeln!(out, "{:<20} {:>10}", "Skipped SQL", self.skipped_sql_statements);
        out
    }
}

/// Stage artifacts of one form.
pub struct Artifacts<'a> {
    pub form: &'a FormBundle,
    pub kdm: &'a CodeModel,
    pub primitives: &'a PrimitivesRoot,
    pub platform: &'a TargetPlatformModel,
    pub oo: &'a OOModel,
    pub java: &'a SourceFileSet,
}

struct SqlCount {
    statements: usize,
    extra: usize,
}

fn sql_in(block: &PlSqlBlock) -> SqlCount {
    let mut c = SqlCount { statements: 0, extra: 0 };
    let mut visit = |s: &crate::frontend::ast::Statement| match &s.kind {
        StatementKind::SelectInto { into, .. } => {
            c.statements += 1;
            c.extra += into.len().saturating_sub(1);
        }
        StatementKind::Dml { .. } => c.statements += 1,
        _ => {}
    };
    walk_block(block, &mut visit);
    for h in &block.handlers {
        crate::frontend::ast::walk_statements(&h.statements, &mut visit);
    }
    c
}

/// Trigger that migrates to nothing: no statements, handlers or initialized declarations.
pub fn is_empty_trigger(t: &Trigger) -> bool {
    t.is_empty() && t.body.declarations.iter().all(|d| d.init.is_none())
}

fn count_db(prims: &[Primitive]) -> usize {
    let mut n = 0;
    for p in prims {
        p.visit(&mut |q| match &q.kind {
            PrimitiveKind::ReadFromDB { into, .. } => n += into.len(),
            PrimitiveKind::WriteToDB { .. } => n += 1,
            _ => {}
        });
    }
    n
}

fn declares(content: &str, name: &str) -> bool {
    content.lines().any(|l| {
        let l = l.trim();
        l.ends_with('{') && l.contains(&format!(" {name}(")) && !l.starts_with(name)
    })
}

pub fn measure(a: &Artifacts) -> MetricsReport {
    let mut stages = Vec::new();

    let mut forms = StageMetrics {
        stage: Stage::Forms,
        triggers: 0,
        program_units: a.form.program_units.len(),
        sql_statements: 0,
        skipped_data_block_triggers: 0,
        empty_triggers: 0,
    };
    let mut extra = 0;
    let mut skipped_sql = 0;
    for (_, t) in a.form.triggers() {
        forms.triggers += 1;
        let sql = sql_in(&t.body);
        forms.sql_statements += sql.statements;
        if t.owner_kind == TriggerOwner::DataBlock {
            forms.skipped_data_block_triggers += 1;
            skipped_sql += sql.statements;
        } else if is_empty_trigger(t) {
            forms.empty_triggers += 1;
        } else {
            extra += sql.extra;
        }
    }
    for u in &a.form.program_units {
        let sql = sql_in(&u.body);
        forms.sql_statements += sql.statements;
        extra += sql.extra;
    }
    let skipped = (forms.skipped_data_block_triggers, forms.empty_triggers);
    stages.push(forms);

    let kdm_sql = a
        .kdm
        .elements
        .iter()
        .filter(|e| matches!(e, Element::ActionElement(x) if x.name.is_sql()))
        .count();
    stages.push(StageMetrics {
        stage: Stage::Kdm,
        triggers: a.kdm.callables().filter(|c| c.origin == Origin::Trigger).count(),
        program_units: a.kdm.callables().filter(|c| c.origin == Origin::ProgramUnit).count(),
        sql_statements: kdm_sql,
        skipped_data_block_triggers: skipped.0,
        empty_triggers: skipped.1,
    });

    let prim_sql: usize = a
        .primitives
        .codes
        .iter()
        .map(|c| {
            let mut n = 0;
            for p in &c.primitives {
                p.visit(&mut |q| {
                    if matches!(q.kind, PrimitiveKind::ReadFromDB { .. } | PrimitiveKind::WriteToDB { .. }) {
                        n += 1
                    }
                });
            }
            n
        })
        .sum();
    stages.push(StageMetrics {
        stage: Stage::Primitives,
        triggers: a.primitives.codes.iter().filter(|c| c.origin_kind == CodeOrigin::Trigger).count(),
        program_units: a.primitives.codes.iter().filter(|c| c.origin_kind == CodeOrigin::ProgramUnit).count(),
        sql_statements: prim_sql,
        skipped_data_block_triggers: skipped.0,
        empty_triggers: skipped.1,
    });

    let mapped_codes: Vec<&str> = a
        .platform
        .event_handlers()
        .map(|h| h.code.as_str())
        .chain(
            a.platform
                .services
                .iter()
                .filter(|s| s.kind == ServiceKind::App)
                .flat_map(|s| s.methods.iter().map(|m| m.code())),
        )
        .collect();
    let platform_sql = mapped_codes
        .iter()
        .filter_map(|c| a.primitives.code(c))
        .map(|c| count_db(&c.primitives))
        .sum();
    stages.push(StageMetrics {
        stage: Stage::Platform,
        triggers: a.platform.event_handlers().count(),
        program_units: a.platform.app_service().map(|s| s.methods.len()).unwrap_or(0),
        sql_statements: platform_sql,
        skipped_data_block_triggers: skipped.0,
        empty_triggers: skipped.1,
    });

    let methods = |role: MethodRole| -> usize {
        a.oo
            .classes
            .iter()
            .flat_map(|c| c.methods.iter())
            .filter(|m| m.role == role)
            .count()
    };
    stages.push(StageMetrics {
        stage: Stage::Oo,
        triggers: methods(MethodRole::EventHandler),
        program_units: methods(MethodRole::Helper),
        sql_statements: a.oo.classes.iter().map(count_db_calls).sum(),
        skipped_data_block_triggers: skipped.0,
        empty_triggers: skipped.1,
    });

    let mut java = StageMetrics {
        stage: Stage::Java,
        triggers: 0,
        program_units: 0,
        sql_statements: 0,
        skipped_data_block_triggers: skipped.0,
        empty_triggers: skipped.1,
    };
    for class in &a.oo.classes {
        let Some(file) = a.java.get(&format!("{}.java", class.name)) else { continue };
        for m in &class.methods {
            if !declares(&file.content, &m.name) {
                continue;
            }
            match m.role {
                MethodRole::EventHandler => java.triggers += 1,
                MethodRole::Helper => java.program_units += 1,
                _ => {}
            }
        }
    }
    for f in &a.java.files {
        for name in ["readFromDB(", "writeToDB("] {
            let calls = f.content.matches(name).count();
            let decls = f
                .content
                .lines()
                .filter(|l| l.trim_start().starts_with("public") && l.contains(name))
                .count();
            java.sql_statements += calls - decls;
        }
    }
    stages.push(java);

    MetricsReport {
        form_name: a.form.form_name.name.clone(),
        stages,
        select_into_extra: extra,
        skipped_sql_statements: skipped_sql,
    }
}

/// Conservation laws between stages; empty when every unit of legacy code was carried through.
pub fn coverage_check(r: &MetricsReport) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let forms = r.stage(Stage::Forms);
    let migrated = forms
        .triggers
        .saturating_sub(forms.skipped_data_block_triggers + forms.empty_triggers);
    let expected_sql = (forms.sql_statements + r.select_into_extra).saturating_sub(r.skipped_sql_statements);
    let mut fail = |msg: String| out.push(Diagnostic::warning(codes::COVERAGE, format!("{}: {msg}", r.form_name)));
    for s in &r.stages[1..] {
        let name = s.stage.as_str();
        let triggers = match s.stage {
            Stage::Kdm | Stage::Primitives => forms.triggers,
            _ => migrated,
        };
        if s.triggers != triggers {
            fail(format!("trigger count at stage {name}: expected {triggers}, found {}", s.triggers));
        }
        if s.program_units != forms.program_units {
            fail(format!(
                "unit count regression at stage {name}: expected {}, found {}",
                forms.program_units, s.program_units
            ));
        }
        let sql = match s.stage {
            Stage::Kdm | Stage::Primitives => forms.sql_statements,
            _ => expected_sql,
        };
        if s.sql_statements != sql {
            fail(format!("SQL count at stage {name}: expected {sql}, found {}", s.sql_statements));
        }
    }
    out
}
