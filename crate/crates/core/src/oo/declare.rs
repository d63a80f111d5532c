//! Shared-variable detection and declaration placement.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::model::*;

pub const UNINITIALIZED_COMMENT: &str = "// Variable not explicitly initialized";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AccessKind {
    Read,
    Write,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableAccess {
    pub variable: String,
    pub kind: AccessKind,
    pub method: String,
    /// Innermost block holding the access; `None` before statements exist.
    pub block: Option<BlockId>,
    /// Statement index taken in each enclosing block, outermost first.
    pub path: Vec<(BlockId, usize)>,
}

/// Parent relation of the blocks of one method.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockTree {
    parent: BTreeMap<BlockId, Option<BlockId>>,
}

impl BlockTree {
    pub fn new() -> BlockTree {
        BlockTree::default()
    }

    pub fn add(&mut self, id: BlockId, parent: Option<BlockId>) {
        self.parent.insert(id, parent);
    }

    pub fn of_method(body: &Block) -> BlockTree {
        fn walk(t: &mut BlockTree, b: &Block, parent: Option<BlockId>) {
            t.add(b.id, parent);
            for s in &b.stmts {
                for c in s.blocks() {
                    walk(t, c, Some(b.id));
                }
            }
        }
        let mut t = BlockTree::new();
        walk(&mut t, body, None);
        t
    }

    pub fn parent(&self, id: BlockId) -> Option<BlockId> {
        self.parent.get(&id).copied().flatten()
    }

    pub fn blocks(&self) -> impl Iterator<Item = BlockId> + '_ {
        self.parent.keys().copied()
    }

    /// True if `outer` is `inner` or one of its ancestors.
    pub fn contains(&self, outer: BlockId, inner: BlockId) -> bool {
        let mut cur = Some(inner);
        while let Some(b) = cur {
            if b == outer {
                return true;
            }
            cur = self.parent(b);
        }
        false
    }

    pub fn depth(&self, id: BlockId) -> usize {
        let mut d = 0;
        let mut cur = self.parent(id);
        while let Some(b) = cur {
            d += 1;
            cur = self.parent(b);
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub block: BlockId,
    /// The first access reads the variable.
    pub warn: bool,
}

/// Block that must hold the declaration of a variable accessed (in source
/// order) by `accesses`, all within one method.
pub fn place_variable_declaration(accesses: &[VariableAccess], tree: &BlockTree) -> Placement {
    let first = &accesses[0];
    let mut declaration = first.block.expect("access without block");
    for access in &accesses[1..] {
        let block = access.block.expect("access without block");
        declaration = if declaration == block || tree.contains(declaration, block) {
            declaration
        } else if tree.contains(block, declaration) {
            block
        } else {
            let mut cur = tree.parent(declaration);
            loop {
                match cur {
                    Some(b) if tree.contains(b, block) => break b,
                    Some(b) => cur = tree.parent(b),
                    None => panic!("blocks {declaration} and {block} share no ancestor"),
                }
            }
        };
    }
    Placement {
        block: declaration,
        warn: first.kind == AccessKind::Read,
    }
}

/// Variables accessed from two or more distinct methods.
pub fn detect_shared_variables(accesses: &[VariableAccess]) -> BTreeSet<String> {
    let mut methods: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for a in accesses {
        methods.entry(&a.variable).or_default().insert(&a.method);
    }
    methods
        .into_iter()
        .filter(|(_, m)| m.len() >= 2)
        .map(|(v, _)| v.to_string())
        .collect()
}

/// Collects accesses to `locals` in evaluation order.
pub fn collect_accesses(method: &Method, locals: &BTreeSet<String>) -> Vec<VariableAccess> {
    struct W<'a> {
        locals: &'a BTreeSet<String>,
        method: &'a str,
        path: Vec<(BlockId, usize)>,
        out: Vec<VariableAccess>,
    }
    impl W<'_> {
        fn record(&mut self, name: &str, kind: AccessKind) {
            if self.locals.contains(name) {
                self.out.push(VariableAccess {
                    variable: name.to_string(),
                    kind,
                    method: self.method.to_string(),
                    block: self.path.last().map(|p| p.0),
                    path: self.path.clone(),
                });
            }
        }

        fn reads(&mut self, e: &OExpr) {
            e.visit(&mut |x| {
                if let OExpr::Name(n) = x {
                    if self.locals.contains(n) {
                        self.out.push(VariableAccess {
                            variable: n.clone(),
                            kind: AccessKind::Read,
                            method: self.method.to_string(),
                            block: self.path.last().map(|p| p.0),
                            path: self.path.clone(),
                        });
                    }
                }
            });
        }

        fn block(&mut self, b: &Block) {
            for (i, s) in b.stmts.iter().enumerate() {
                self.path.push((b.id, i));
                for e in s.exprs() {
                    self.reads(e);
                }
                match s {
                    Stmt::VariableAssign { target, .. } => self.record(target, AccessKind::Write),
                    Stmt::VariableDeclaration { name, .. } => self.record(name, AccessKind::Write),
                    _ => {}
                }
                for c in s.blocks() {
                    self.block(c);
                }
                self.path.pop();
            }
        }
    }
    let mut w = W {
        locals,
        method: &method.name,
        path: Vec::new(),
        out: Vec::new(),
    };
    w.block(&method.body);
    // The innermost entry names the statement; the block is the one holding it.
    w.out
}

fn find_block(b: &mut Block, id: BlockId) -> Option<&mut Block> {
    if b.id == id {
        return Some(b);
    }
    for s in &mut b.stmts {
        for c in s.blocks_mut() {
            if let Some(found) = find_block(c, id) {
                return Some(found);
            }
        }
    }
    None
}

/// Declares each accessed local of `types` (name to Java type) in the block
/// chosen by [`place_variable_declaration`]. Returns the names whose first
/// access is a read.
pub fn declare_locals(method: &mut Method, types: &[(String, String)]) -> Vec<String> {
    let names: BTreeSet<String> = types.iter().map(|(n, _)| n.clone()).collect();
    let accesses = collect_accesses(method, &names);
    let tree = BlockTree::of_method(&method.body);
    let mut fusions: Vec<(BlockId, usize, String, String)> = Vec::new();
    let mut inserts: Vec<(BlockId, usize, usize, Stmt)> = Vec::new();
    let mut warned = Vec::new();
    for (order, (name, ty)) in types.iter().enumerate() {
        let mine: Vec<VariableAccess> = accesses.iter().filter(|a| &a.variable == name).cloned().collect();
        if mine.is_empty() {
            continue;
        }
        let placement = place_variable_declaration(&mine, &tree);
        let first = &mine[0];
        let index = first
            .path
            .iter()
            .find(|(b, _)| *b == placement.block)
            .map(|(_, i)| *i)
            .expect("declaration block encloses the first access");
        method.locals.push(Param {
            name: name.clone(),
            ty: ty.clone(),
        });
        if first.kind == AccessKind::Write && first.block == Some(placement.block) {
            fusions.push((placement.block, index, name.clone(), ty.clone()));
        } else {
            if placement.warn {
                warned.push(name.clone());
            }
            inserts.push((
                placement.block,
                index,
                order,
                Stmt::VariableDeclaration {
                    name: name.clone(),
                    ty: ty.clone(),
                    init: Some(OExpr::Literal("null".into())),
                    comment: placement.warn.then(|| UNINITIALIZED_COMMENT.to_string()),
                },
            ));
        }
    }
    for (block, index, name, ty) in fusions {
        let b = find_block(&mut method.body, block).expect("block");
        let stmt = &mut b.stmts[index];
        if let Stmt::VariableAssign { target, value } = stmt {
            debug_assert_eq!(target, &name);
            *stmt = Stmt::VariableDeclaration {
                name,
                ty,
                init: Some(value.clone()),
                comment: None,
            };
        }
    }
    // Later positions first so earlier indices stay valid; ties keep variable order.
    inserts.sort_by_key(|i| std::cmp::Reverse((i.0, i.1, i.2)));
    for (block, index, _, stmt) in inserts {
        let b = find_block(&mut method.body, block).expect("block");
        b.stmts.insert(index, stmt);
    }
    warned
}
