mod common;

use forms2mvc::metrics::*;
use forms2mvc::pipeline::{run, PipelineOptions};

#[test]
fn fixture_counts() {
    let out = run(common::FIXTURE, "renew_grants.form", &PipelineOptions::default()).unwrap();
    let r = &out.metrics;
    for s in Stage::ALL {
        let m = r.stage(s);
        assert_eq!((m.triggers, m.program_units), (1, 1), "{s:?}");
    }
    assert_eq!(r.stage(Stage::Forms).sql_statements, 4);
    assert_eq!(r.stage(Stage::Kdm).sql_statements, 4);
    assert_eq!(r.select_into_extra, 1);
    for s in [Stage::Platform, Stage::Oo, Stage::Java] {
        assert_eq!(r.stage(s).sql_statements, 5, "{s:?}");
    }
    assert!(coverage_check(r).is_empty());
    let table = r.to_table();
    assert!(table.lines().nth(1).unwrap().split_whitespace().eq(["forms", "kdm", "primitives", "platform", "oo", "java"]));
    let back: MetricsReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(&back, r);
}

#[test]
fn skipped_triggers_are_reported() {
    let src = "FORM F\nWINDOW W BLOCK B\nITEM X : TEXT\nITEM GO : BUTTON\n\
               TRIGGER GO.WHEN-BUTTON-PRESSED\nEND TRIGGER\n\
               TRIGGER B.POST-QUERY\nBEGIN DELETE FROM t; END;\nEND TRIGGER\nEND FORM\n";
    let out = run(src, "f.form", &PipelineOptions::default()).unwrap();
    let r = &out.metrics;
    let forms = r.stage(Stage::Forms);
    assert_eq!((forms.triggers, forms.empty_triggers, forms.skipped_data_block_triggers), (2, 1, 1));
    assert_eq!(r.skipped_sql_statements, 1);
    assert_eq!(r.stage(Stage::Primitives).triggers, 2);
    assert_eq!(r.stage(Stage::Oo).triggers, 0);
    assert_eq!(r.stage(Stage::Java).sql_statements, 0);
    assert!(coverage_check(r).is_empty());
    assert!(out.diagnostics.iter().any(|d| d.code == "T001"));
    assert!(out.diagnostics.iter().any(|d| d.code == "T002"));
}

#[test]
fn coverage_loss_is_flagged() {
    let out = run(common::FIXTURE, "renew_grants.form", &PipelineOptions::default()).unwrap();
    let mut r = out.metrics.clone();
    r.stages.iter_mut().find(|s| s.stage == Stage::Oo).unwrap().program_units = 0;
    r.stages.iter_mut().find(|s| s.stage == Stage::Java).unwrap().sql_statements = 4;
    let d = coverage_check(&r);
    assert_eq!(d.len(), 2);
    assert!(d.iter().all(|d| d.code == "M001"));
}

#[test]
fn random_corpus_matches_construction_counts() {
    for seed in 0..60 {
        let (text, stats) = common::random_form_with_stats(seed);
        let out = run(&text, "random.form", &PipelineOptions::default()).unwrap();
        let r = &out.metrics;
        let forms = r.stage(Stage::Forms);
        assert_eq!(forms.triggers, stats.triggers, "seed {seed}");
        assert_eq!(forms.empty_triggers, stats.empty_triggers, "seed {seed}");
        assert_eq!(forms.skipped_data_block_triggers, stats.data_block_triggers, "seed {seed}");
        assert_eq!(forms.program_units, stats.units, "seed {seed}");
        assert_eq!(forms.sql_statements, stats.sql, "seed {seed}");
        assert_eq!(r.select_into_extra, stats.select_extra, "seed {seed}");
        let migrated = stats.triggers - stats.empty_triggers - stats.data_block_triggers;
        for s in [Stage::Platform, Stage::Oo, Stage::Java] {
            let m = r.stage(s);
            assert_eq!(m.triggers, migrated, "seed {seed} {s:?}");
            assert_eq!(m.program_units, stats.units, "seed {seed} {s:?}");
            assert_eq!(m.sql_statements, stats.sql - stats.skipped_sql + stats.select_extra, "seed {seed} {s:?}");
        }
        assert!(coverage_check(r).is_empty(), "seed {seed}");
    }
}
