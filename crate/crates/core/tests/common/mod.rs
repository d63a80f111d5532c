//! Seeded generator of random form descriptors.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURE: &str = include_str!("../../../../fixtures/renew_grants.form");

struct Window {
    name: String,
    block: String,
    texts: Vec<String>,
    buttons: Vec<String>,
}

struct Unit {
    name: String,
    function: bool,
}

/// Counts known by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormStats {
    pub triggers: usize,
    pub empty_triggers: usize,
    pub data_block_triggers: usize,
    pub units: usize,
    pub sql: usize,
    /// SQL inside data-block triggers.
    pub skipped_sql: usize,
    /// Σ (targets − 1) over SELECT INTO outside data-block triggers.
    pub select_extra: usize,
}

struct Gen {
    rng: ChaCha8Rng,
    stats: FormStats,
    skipping: bool,
    windows: Vec<Window>,
    units: Vec<Unit>,
    /// Locals of the body being generated.
    locals: Vec<String>,
    /// Items bindable from the body being generated; empty inside program units.
    binds: Vec<String>,
    loops: usize,
    in_loop: usize,
    out: String,
}

impl Gen {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<'a>(&mut self, xs: &'a [String]) -> &'a str {
        xs.choose(&mut self.rng).map(|s| s.as_str()).unwrap_or("0")
    }

    fn local(&mut self) -> String {
        let locals = self.locals.clone();
        self.pick(&locals).to_string()
    }

    fn operand(&mut self) -> String {
        let binds = self.binds.clone();
        match self.rng.gen_range(0..5) {
            0 => self.rng.gen_range(0..100).to_string(),
            1 if !binds.is_empty() => self.pick(&binds).to_string(),
            2 if self.chance(0.3) => format!(":GLOBAL.G{}", self.rng.gen_range(0..3)),
            _ => self.local(),
        }
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.chance(0.4) {
            return self.operand();
        }
        let functions: Vec<String> = self.units.iter().filter(|u| u.function).map(|u| u.name.clone()).collect();
        match self.rng.gen_range(0..6) {
            0 if !functions.is_empty() => {
                let f = self.pick(&functions).to_string();
                format!("{f}({})", self.expr(depth - 1))
            }
            1 => format!("length({})", self.expr(depth - 1)),
            _ => {
                let op = ["+", "-", "*"][self.rng.gen_range(0..3)];
                format!("{} {op} {}", self.expr(depth - 1), self.expr(depth - 1))
            }
        }
    }

    fn cond(&mut self) -> String {
        let op = ["=", "<>", "<", ">=", ">"][self.rng.gen_range(0..5)];
        let c = format!("{} {op} {}", self.operand(), self.operand());
        match self.rng.gen_range(0..6) {
            0 => format!("{c} AND {} IS NOT NULL", self.local()),
            1 => format!("NOT {c}"),
            _ => c,
        }
    }

    fn count_sql(&mut self, extra: usize) {
        self.stats.sql += 1;
        if self.skipping {
            self.stats.skipped_sql += 1;
        } else {
            self.stats.select_extra += extra;
        }
    }

    fn line(&mut self, indent: usize, text: &str) {
        self.out.push_str(&"  ".repeat(indent));
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn stmts(&mut self, indent: usize, depth: u32, n: usize) {
        for _ in 0..n {
            self.stmt(indent, depth);
        }
    }

    fn stmt(&mut self, indent: usize, depth: u32) {
        let ui = !self.binds.is_empty();
        let procedures: Vec<String> = self.units.iter().filter(|u| !u.function).map(|u| u.name.clone()).collect();
        let nested = depth > 0;
        match self.rng.gen_range(0..16) {
            0 | 1 => {
                let s = format!("{} := {};", self.local(), self.expr(2));
                self.line(indent, &s);
            }
            2 => {
                let n = self.rng.gen_range(1..=3.min(self.locals.len()));
                let targets: Vec<String> = self.locals.choose_multiple(&mut self.rng, n).cloned().collect();
                let cols: Vec<String> = (0..n).map(|i| format!("col_{i}")).collect();
                self.count_sql(n - 1);
                let s = format!(
                    "SELECT {} INTO {} FROM app.table_{} WHERE key_col = {};",
                    cols.join(", "),
                    targets.join(", "),
                    self.rng.gen_range(0..4),
                    self.operand()
                );
                self.line(indent, &s);
            }
            3 => {
                self.count_sql(0);
                let s = match self.rng.gen_range(0..3) {
                    0 => format!("UPDATE app.t SET amount = {} WHERE key_col = {};", self.operand(), self.operand()),
                    1 => format!("INSERT INTO app.t (key_col, amount) VALUES ({}, {});", self.operand(), self.operand()),
                    _ => format!("DELETE FROM app.t WHERE key_col = {};", self.operand()),
                };
                self.line(indent, &s);
            }
            4 | 5 if ui => {
                let w = self.rng.gen_range(0..self.windows.len());
                let block = self.windows[w].block.clone();
                let items = self.windows[w].texts.clone();
                let item = self.pick(&items).to_string();
                let s = match self.rng.gen_range(0..3) {
                    0 => format!("SET_ITEM_PROPERTY('{block}.{item}', visible, property_true);"),
                    1 => format!("SET_ITEM_PROPERTY('{block}.{item}', enabled, property_false);"),
                    _ => format!("GO_ITEM('{block}.{item}');"),
                };
                self.line(indent, &s);
            }
            6 if ui => {
                let binds = self.binds.clone();
                let target = self.pick(&binds).to_string();
                let s = format!("{target} := {};", self.expr(1));
                self.line(indent, &s);
            }
            7 => {
                let s = format!(":GLOBAL.G{} := {};", self.rng.gen_range(0..3), self.operand());
                self.line(indent, &s);
            }
            8 => {
                let s = format!("message('step {}');", self.rng.gen_range(0..100));
                self.line(indent, &s);
            }
            9 if !procedures.is_empty() => {
                let p = self.pick(&procedures).to_string();
                let s = format!("{p}({});", self.operand());
                self.line(indent, &s);
            }
            10 | 11 if nested => {
                let c = self.cond();
                self.line(indent, &format!("IF {c} THEN"));
                let n = self.rng.gen_range(1..4);
                self.stmts(indent + 1, depth - 1, n);
                if self.chance(0.3) {
                    let c = self.cond();
                    self.line(indent, &format!("ELSIF {c} THEN"));
                    let n = self.rng.gen_range(1..3);
                    self.stmts(indent + 1, depth - 1, n);
                }
                if self.chance(0.5) {
                    self.line(indent, "ELSE");
                    let n = self.rng.gen_range(1..3);
                    self.stmts(indent + 1, depth - 1, n);
                }
                self.line(indent, "END IF;");
            }
            12 if nested => {
                let v = self.local();
                let bound = self.rng.gen_range(1..10);
                self.line(indent, &format!("WHILE {v} < {bound} LOOP"));
                self.in_loop += 1;
                let n = self.rng.gen_range(1..3);
                self.stmts(indent + 1, depth - 1, n);
                self.in_loop -= 1;
                self.line(indent + 1, &format!("{v} := {v} + 1;"));
                self.line(indent, "END LOOP;");
            }
            13 if nested => {
                self.loops += 1;
                let i = format!("idx{}", self.loops);
                let bound = self.rng.gen_range(1..5);
                self.line(indent, &format!("FOR {i} IN 1..{bound} LOOP"));
                self.locals.push(i.clone());
                self.in_loop += 1;
                let n = self.rng.gen_range(1..3);
                self.stmts(indent + 1, depth - 1, n);
                self.in_loop -= 1;
                self.locals.retain(|l| *l != i);
                self.line(indent, "END LOOP;");
            }
            14 if nested => {
                self.line(indent, "BEGIN");
                let n = self.rng.gen_range(1..4);
                self.stmts(indent + 1, depth - 1, n);
                if self.chance(0.7) {
                    self.line(indent, "EXCEPTION WHEN OTHERS THEN");
                    self.line(indent + 1, "message('failed');");
                    if self.chance(0.5) {
                        self.line(indent + 1, "RAISE FORM_TRIGGER_FAILURE;");
                    }
                }
                self.line(indent, "END;");
            }
            15 if self.in_loop > 0 => {
                let c = self.cond();
                self.line(indent, &format!("EXIT WHEN {c};"));
            }
            _ => {
                let s = format!("{} := {};", self.local(), self.operand());
                self.line(indent, &s);
            }
        }
    }

    fn declarations(&mut self, indent: usize, prefix: &str) {
        let n = self.rng.gen_range(1..6);
        self.locals = (0..n).map(|i| format!("{prefix}{i}")).collect();
        for l in self.locals.clone() {
            let ty = if self.chance(0.5) { "NUMBER" } else { "VARCHAR2(64)" };
            self.line(indent, &format!("{l} {ty};"));
        }
    }

    fn trigger_body(&mut self) {
        self.line(0, "DECLARE");
        self.declarations(1, "v");
        self.line(0, "BEGIN");
        let n = self.rng.gen_range(1..8);
        self.stmts(1, 3, n);
        self.line(0, "END;");
    }

    fn form(mut self, seed: u64) -> (String, FormStats) {
        let nw = self.rng.gen_range(1..=2);
        for w in 0..nw {
            let texts = (0..self.rng.gen_range(1..4)).map(|i| format!("FIELD_{w}_{i}")).collect();
            let buttons = (0..self.rng.gen_range(1..4)).map(|i| format!("BUTTON_{w}_{i}")).collect();
            self.windows.push(Window {
                name: format!("WINDOW_{w}"),
                block: format!("BLOCK_{w}"),
                texts,
                buttons,
            });
        }
        for u in 0..self.rng.gen_range(0..3) {
            let function = self.chance(0.6);
            self.units.push(Unit {
                name: format!("unit_{u}"),
                function,
            });
        }
        self.line(0, &format!("FORM RANDOM_{seed}"));
        for w in 0..nw {
            let (name, block, texts, buttons) = {
                let win = &self.windows[w];
                (win.name.clone(), win.block.clone(), win.texts.clone(), win.buttons.clone())
            };
            self.line(0, &format!("WINDOW {name} BLOCK {block}"));
            for t in &texts {
                self.line(1, &format!("ITEM {t} : TEXT"));
            }
            for b in &buttons {
                self.line(1, &format!("ITEM {b} : BUTTON"));
            }
            self.binds = texts
                .iter()
                .flat_map(|t| [format!(":{t}"), format!(":{block}.{t}")])
                .collect();
            for b in &buttons {
                self.line(1, &format!("TRIGGER {b}.WHEN-BUTTON-PRESSED"));
                self.stats.triggers += 1;
                if self.chance(0.1) {
                    self.stats.empty_triggers += 1;
                } else {
                    self.trigger_body();
                }
                self.line(1, "END TRIGGER");
            }
            if self.chance(0.3) {
                self.line(1, &format!("TRIGGER {block}.POST-QUERY"));
                self.stats.triggers += 1;
                self.stats.data_block_triggers += 1;
                self.skipping = true;
                self.trigger_body();
                self.skipping = false;
                self.line(1, "END TRIGGER");
            }
        }
        self.binds.clear();
        for u in 0..self.units.len() {
            let (name, function) = (self.units[u].name.clone(), self.units[u].function);
            // A unit only calls units declared before it.
            let later = self.units.split_off(u);
            self.line(0, "PROGRAM UNIT");
            if function {
                self.line(0, &format!("FUNCTION {name} (p_in IN VARCHAR2) RETURN VARCHAR2 IS"));
            } else {
                self.line(0, &format!("PROCEDURE {name} (p_in IN NUMBER) IS"));
            }
            self.declarations(1, "w");
            self.locals.push("p_in".into());
            self.line(0, "BEGIN");
            let n = self.rng.gen_range(1..5);
            self.stmts(1, 2, n);
            if function {
                let r = self.expr(1);
                self.line(1, &format!("RETURN {r};"));
            }
            self.line(0, "END;");
            self.line(0, "END UNIT");
            self.units.extend(later);
        }
        self.line(0, "END FORM");
        self.stats.units = self.units.len();
        (self.out, self.stats)
    }
}

/// Random well-formed descriptor: one or two windows, button triggers (some
/// empty), optional data-block triggers and program units.
pub fn random_form(seed: u64) -> String {
    random_form_with_stats(seed).0
}

pub fn random_form_with_stats(seed: u64) -> (String, FormStats) {
    let g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        stats: FormStats::default(),
        skipping: false,
        windows: Vec::new(),
        units: Vec::new(),
        locals: Vec::new(),
        binds: Vec::new(),
        loops: 0,
        in_loop: 0,
        out: String::new(),
    };
    g.form(seed)
}

pub fn corpus(n: u64) -> Vec<(String, String)> {
    (0..n).map(|s| (format!("random_{s}.form"), random_form(s))).collect()
}
