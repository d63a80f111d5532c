use std::collections::BTreeMap;

use forms2mvc::flowgraph::*;
use forms2mvc::pipeline::{run, PipelineOptions};

pub const SALARY: &str = "FORM PAYROLL\nWINDOW PAYROLL BLOCK EMP\nITEM CALC : BUTTON\nTRIGGER CALC.WHEN-BUTTON-PRESSED\n\
DECLARE\n  salary NUMBER;\n  threshold NUMBER;\n  bonus NUMBER;\nBEGIN\n\
threshold := 1000;\nIF salary > threshold THEN\n  bonus := salary - threshold;\nELSE\n  bonus := 100 + threshold - salary;\nEND IF;\nsalary := salary + bonus;\n\
END;\nEND TRIGGER\nEND FORM\n";

fn salary_graph() -> FlowGraph {
    let out = run(SALARY, "payroll.form", &PipelineOptions::default()).unwrap();
    assert_eq!(out.flows.len(), 1);
    assert_eq!(out.flows[0].name, "PAYROLL_PAYROLL_CALC_WHEN-BUTTON-PRESSED");
    out.flows[0].graph.clone()
}

#[test]
fn salary_bonus_graph() {
    let g = salary_graph();
    let labels: Vec<(&str, NodeCategory)> = g.nodes.iter().map(|n| (n.label.as_str(), n.category)).collect();
    assert_eq!(
        labels,
        [
            ("CALC.WHEN-BUTTON-PRESSED", NodeCategory::Trigger),
            ("INITIAL", NodeCategory::Initial),
            ("threshold := 1000;", NodeCategory::Fragment),
            ("IF salary > threshold THEN", NodeCategory::Fragment),
            ("bonus := salary - threshold;", NodeCategory::Fragment),
            ("bonus := 100 + threshold - salary;", NodeCategory::Fragment),
            ("salary := salary + bonus;", NodeCategory::Fragment),
            ("FINAL", NodeCategory::Final),
        ]
    );
    let mut edges = g.edges.clone();
    edges.sort();
    assert_eq!(edges, [(0, 1), (1, 2), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6), (6, 7)]);
}

#[test]
fn colors() {
    assert_eq!(NodeCategory::Trigger.color(), "pink");
    assert_eq!(NodeCategory::Fragment.color(), "green");
    assert_eq!(NodeCategory::Initial.color(), "blue");
    assert_eq!(NodeCategory::Final.color(), "purple");
}

type Multiset<T> = BTreeMap<T, usize>;

fn count<T: Ord>(xs: impl IntoIterator<Item = T>) -> Multiset<T> {
    let mut m = BTreeMap::new();
    for x in xs {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

/// Value of `key` in a `key: 'v'` or `key="v"` attribute list.
fn attr(line: &str, key: &str) -> String {
    for (open, close) in [(format!("{key}: '"), '\''), (format!("{key}=\""), '"'), (format!("{key}: "), ',')] {
        if let Some(i) = line.find(&open) {
            let rest = &line[i + open.len()..];
            let mut out = String::new();
            let mut chars = rest.chars();
            while let Some(c) = chars.next() {
                match c {
                    '\\' => out.extend(chars.next()),
                    c if c == close => break,
                    c => out.push(c),
                }
            }
            return out;
        }
    }
    panic!("no {key} in {line}")
}

fn parse_cypher(text: &str) -> (Multiset<(String, String, String)>, Multiset<(String, String)>) {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for l in text.lines() {
        if l.contains("-[:NEXT]->") {
            let ids: Vec<String> = l.split(['(', ')']).filter(|s| s.starts_with('n')).map(String::from).collect();
            edges.push((ids[0].clone(), ids[1].clone()));
        } else if l.starts_with("CREATE (") {
            let id = l["CREATE (".len()..].split(':').next().unwrap().to_string();
            nodes.push((id, attr(l, "label"), attr(l, "color")));
        }
    }
    (count(nodes), count(edges))
}

fn parse_dot(text: &str) -> (Multiset<(String, String, String)>, Multiset<(String, String)>) {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for l in text.lines().map(str::trim) {
        if let Some((a, b)) = l.split_once(" -> ") {
            edges.push((a.to_string(), b.trim_end_matches(';').to_string()));
        } else if l.starts_with('n') && l.contains("[label=") {
            let id = l.split(' ').next().unwrap().to_string();
            nodes.push((id, attr(l, "label"), attr(l, "fillcolor")));
        }
    }
    (count(nodes), count(edges))
}

#[test]
fn cypher_and_dot_agree() {
    let g = salary_graph();
    let cypher = parse_cypher(&emit(&g, FlowFormat::Cypher, "salary"));
    let dot = parse_dot(&emit(&g, FlowFormat::Dot, "salary"));
    assert_eq!(cypher, dot);
    assert_eq!(cypher.0.values().sum::<usize>(), 8);
    assert_eq!(cypher.1.values().sum::<usize>(), 8);
}

#[test]
fn labels_with_quotes_survive_both_formats() {
    let g = FlowGraph {
        nodes: vec![
            FlowNode { id: 0, label: "message('it''s \"x\"');".into(), category: NodeCategory::Fragment },
            FlowNode { id: 1, label: "FINAL".into(), category: NodeCategory::Final },
        ],
        edges: vec![(0, 1)],
    };
    assert_eq!(parse_cypher(&emit(&g, FlowFormat::Cypher, "q")), parse_dot(&emit(&g, FlowFormat::Dot, "q")));
}

#[test]
fn loops_have_back_edges_and_returns_reach_final() {
    let src = "FORM F\nWINDOW W\nITEM B : BUTTON\nTRIGGER B.WHEN-BUTTON-PRESSED\n\
               DECLARE i NUMBER; BEGIN WHILE i < 3 LOOP i := i + 1; EXIT WHEN i = 2; END LOOP; RETURN; END;\nEND TRIGGER\nEND FORM\n";
    let out = run(src, "f.form", &PipelineOptions::default()).unwrap();
    let g = &out.flows[0].graph;
    let find = |prefix: &str| g.nodes.iter().find(|n| n.label.starts_with(prefix)).unwrap().id;
    let (w, body, ret, fin) = (find("WHILE"), find("i := i + 1"), find("RETURN"), g.nodes.len() - 1);
    assert!(g.edges.contains(&(w, body)));
    assert!(g.edges.iter().any(|&(a, b)| b == w && a > w));
    assert!(g.edges.contains(&(w, ret)));
    assert!(g.edges.contains(&(ret, fin)));
    assert_eq!(g.nodes[fin].category, NodeCategory::Final);
}

#[test]
fn format_names() {
    assert_eq!("DOT".parse::<FlowFormat>().unwrap(), FlowFormat::Dot);
    assert_eq!("cypher".parse::<FlowFormat>().unwrap().extension(), "cypher");
    assert!("svg".parse::<FlowFormat>().is_err());
}
