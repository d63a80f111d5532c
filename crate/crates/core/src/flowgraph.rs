//! Execution-flow graphs of trigger primitives, emitted as Cypher or DOT.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::kdm::CodeModel;
use crate::primitives::{Code, Primitive, PrimitiveKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NodeCategory {
    Trigger,
    Fragment,
    Initial,
    Final,
}

impl NodeCategory {
    pub fn color(self) -> &'static str {
        match self {
            NodeCategory::Trigger => "pink",
            NodeCategory::Fragment => "green",
            NodeCategory::Initial => "blue",
            NodeCategory::Final => "purple",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeCategory::Trigger => "TRIGGER",
            NodeCategory::Fragment => "FRAGMENT",
            NodeCategory::Initial => "INITIAL",
            NodeCategory::Final => "FINAL",
        }
    }

    fn label(self) -> &'static str {
        match self {
            NodeCategory::Trigger => "Trigger",
            NodeCategory::Fragment => "Fragment",
            NodeCategory::Initial => "Initial",
            NodeCategory::Final => "Final",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowNode {
    pub id: usize,
    pub label: String,
    pub category: NodeCategory,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowGraph {
    pub nodes: Vec<FlowNode>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowFormat {
    Cypher,
    Dot,
}

impl FlowFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FlowFormat::Cypher => "cypher",
            FlowFormat::Dot => "dot",
        }
    }
}

impl std::str::FromStr for FlowFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<FlowFormat, String> {
        match s.to_ascii_lowercase().as_str() {
            "cypher" => Ok(FlowFormat::Cypher),
            "dot" => Ok(FlowFormat::Dot),
            other => Err(format!("unknown flow format `{other}` (expected cypher or dot)")),
        }
    }
}

struct Builder<'a> {
    graph: FlowGraph,
    edges: BTreeSet<(usize, usize)>,
    kdm: Option<&'a CodeModel>,
    final_id: usize,
    breaks: Vec<Vec<usize>>,
}

impl Builder<'_> {
    fn node(&mut self, label: String, category: NodeCategory) -> usize {
        let id = self.graph.nodes.len();
        self.graph.nodes.push(FlowNode { id, label, category });
        id
    }

    fn edge(&mut self, from: usize, to: usize) {
        if self.edges.insert((from, to)) {
            self.graph.edges.push((from, to));
        }
    }

    fn label(&self, p: &Primitive) -> String {
        let snippet = self
            .kdm
            .and_then(|m| p.kdm_ref.first().and_then(|id| m.get(*id)))
            .and_then(|e| e.source_ref())
            .and_then(|r| r.snippet.lines().next().map(|l| l.trim().to_string()));
        match snippet {
            Some(s) if !s.is_empty() => s,
            _ => p.kind.name().to_string(),
        }
    }

    /// Chains `prims` after `preds` and returns the nodes control leaves from.
    fn seq(&mut self, prims: &[Primitive], preds: Vec<usize>) -> Vec<usize> {
        let mut preds = preds;
        for p in prims {
            let n = self.node(self.label(p), NodeCategory::Fragment);
            for &from in &preds {
                self.edge(from, n);
            }
            preds = match &p.kind {
                PrimitiveKind::SelectionFlow { cases, .. } => {
                    let mut exits = Vec::new();
                    for c in cases {
                        exits.extend(self.seq(&c.body, vec![n]));
                    }
                    if !cases.iter().any(|c| c.condition.is_none()) {
                        exits.push(n);
                    }
                    exits
                }
                PrimitiveKind::Loop { body, .. } => {
                    self.breaks.push(Vec::new());
                    for end in self.seq(body, vec![n]) {
                        self.edge(end, n);
                    }
                    let mut exits = vec![n];
                    exits.extend(self.breaks.pop().unwrap_or_default());
                    exits
                }
                PrimitiveKind::Try { body, catches } => {
                    let mut exits = self.seq(body, vec![n]);
                    for c in catches {
                        exits.extend(self.seq(&c.body, vec![n]));
                    }
                    exits
                }
                PrimitiveKind::Return { .. } | PrimitiveKind::Throw { .. } => {
                    self.edge(n, self.final_id);
                    Vec::new()
                }
                PrimitiveKind::Break => {
                    match self.breaks.last_mut() {
                        Some(b) => b.push(n),
                        None => self.edge(n, self.final_id),
                    }
                    Vec::new()
                }
                _ => vec![n],
            };
            preds.sort();
            preds.dedup();
        }
        preds
    }
}

/// Flow of `code`: trigger node, initial node, one node per primitive
/// statement and a final node. `kdm` supplies statement snippets as labels.
pub fn build_flow(code: &Code, trigger_label: &str, kdm: Option<&CodeModel>) -> FlowGraph {
    let mut b = Builder {
        graph: FlowGraph::default(),
        edges: BTreeSet::new(),
        kdm,
        final_id: 0,
        breaks: Vec::new(),
    };
    let trigger = b.node(trigger_label.to_string(), NodeCategory::Trigger);
    let initial = b.node("INITIAL".into(), NodeCategory::Initial);
    b.edge(trigger, initial);
    // The final node is numbered last; edges to it are patched afterwards.
    b.final_id = usize::MAX;
    let exits = b.seq(&code.primitives, vec![initial]);
    let fin = b.node("FINAL".into(), NodeCategory::Final);
    for e in &mut b.graph.edges {
        if e.1 == usize::MAX {
            e.1 = fin;
        }
    }
    for from in exits {
        if !b.graph.edges.contains(&(from, fin)) {
            b.graph.edges.push((from, fin));
        }
    }
    b.graph
}

fn cypher_string(s: &str) -> String {
    let mut out = String::from("'");
    for c in s.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn dot_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn emit(graph: &FlowGraph, format: FlowFormat, name: &str) -> String {
    let mut out = String::new();
    match format {
        FlowFormat::Cypher => {
            let _ = writeln!(out, "// {name}");
            for n in &graph.nodes {
                let _ = writeln!(
                    out,
                    "CREATE (n{}:{} {{id: {}, label: {}, category: '{}', color: '{}'}})",
                    n.id,
                    n.category.label(),
                    n.id,
                    cypher_string(&n.label),
                    n.category.as_str(),
                    n.category.color()
                );
            }
            for (a, b) in &graph.edges {
                let _ = writeln!(out, "CREATE (n{a})-[:NEXT]->(n{b})");
            }
            out.push_str(";\n");
        }
        FlowFormat::Dot => {
            let _ = writeln!(out, "digraph {} {{", dot_string(name));
            let _ = writeln!(out, "  node [style=filled];");
            for n in &graph.nodes {
                let _ = writeln!(
                    out,
                    "  n{} [label={}, category=\"{}\", fillcolor=\"{}\"];",
                    n.id,
                    dot_string(&n.label),
                    n.category.as_str(),
                    n.category.color()
                );
            }
            for (a, b) in &graph.edges {
                let _ = writeln!(out, "  n{a} -> n{b};");
            }
            out.push_str("}\n");
        }
    }
    out
}
