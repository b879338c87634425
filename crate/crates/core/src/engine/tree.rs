use std::collections::HashMap;

use thiserror::Error;

use super::loopcheck::is_expanded_variant;
use super::unify::moded_unify;
use crate::syntax::ops::{goal_kind, GoalKind};
use crate::syntax::{Label, ModedQuery, Program, Subst, Term, Var};

pub type NodeId = usize;

/// Limits for tree construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeConfig {
    /// Hard cap on the number of nodes.
    pub node_cap: usize,
    /// Loop-check repetition threshold: a clause is cut once the selected
    /// atom and `rep - 1` of its ancestors are expanded variants of each other
    /// with that clause applied. Values below 2 behave as 2.
    pub rep: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { node_cap: 10_000, rep: 2 }
    }
}

/// An atom of a goal together with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalAtom {
    pub atom: Term,
    /// Stable identity of this atom occurrence across derivation steps.
    pub uid: usize,
    /// Node and clause whose application introduced this atom; `None` for the query.
    pub caller: Option<(NodeId, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Expanded,
    /// Empty goal.
    Success,
    /// No clause applies.
    Failed,
    /// Every applicable clause was cut by the loop check.
    Pruned,
    /// A built-in outside the handled cases; never expanded.
    Unsupported(String),
    /// Left unexpanded because the node cap was reached.
    Truncated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub id: NodeId,
    pub goal: Vec<GoalAtom>,
    pub parent: Option<NodeId>,
    /// Index into [`ModedTree::edges`] of the edge entering this node.
    pub in_edge: Option<usize>,
    /// Node whose selected atom is the immediate ancestor of this node's selected atom.
    pub ancestor_of_selected: Option<NodeId>,
    pub depth: usize,
    pub status: NodeStatus,
}

impl TreeNode {
    pub fn selected(&self) -> Option<&Term> {
        self.goal.first().map(|g| &g.atom)
    }

    pub fn goal_terms(&self) -> Vec<Term> {
        self.goal.iter().map(|g| g.atom.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EdgeKind {
    /// Resolution with program clause `clause` (0-based index).
    Clause { clause: usize, mgu: Subst, input_bindings: Vec<(Var, Term)> },
    /// `var is expr`; `var` is integer-labelled from here on.
    Cons { var: Var, expr: Term },
    /// A comparison between integer expressions, assumed to succeed.
    Cond { cond: Term },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
    #[error("node {from} is not an ancestor of node {to}")]
    NotAnAncestor { from: NodeId, to: NodeId },
}

/// A finite moded SLD-tree. Nodes are numbered in depth-first pre-order.
#[derive(Clone, Debug, PartialEq)]
pub struct ModedTree {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<Edge>,
    pub root: NodeId,
    /// `(node, clause)` pairs where the loop check pruned a clause.
    pub cut_points: Vec<(NodeId, usize)>,
    /// The node cap was reached.
    pub truncated: bool,
    pub query: ModedQuery,
}

impl ModedTree {
    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn edge_into(&self, id: NodeId) -> Option<&Edge> {
        self.nodes[id].in_edge.map(|e| &self.edges[e])
    }

    pub fn children(&self, id: NodeId) -> Vec<NodeId> {
        self.edges.iter().filter(|e| e.from == id).map(|e| e.to).collect()
    }

    /// Edges on the path `from -> to`, in order.
    pub fn path(&self, from: NodeId, to: NodeId) -> Result<Vec<&Edge>, TreeError> {
        for id in [from, to] {
            if id >= self.nodes.len() {
                return Err(TreeError::NoSuchNode(id));
            }
        }
        let mut out = Vec::new();
        let mut cur = to;
        while cur != from {
            match self.edge_into(cur) {
                Some(e) => {
                    out.push(e);
                    cur = e.from;
                }
                None => return Err(TreeError::NotAnAncestor { from, to }),
            }
        }
        out.reverse();
        Ok(out)
    }

    /// Nodes on the path `from -> to`, both ends included.
    pub fn path_nodes(&self, from: NodeId, to: NodeId) -> Result<Vec<NodeId>, TreeError> {
        let mut nodes = vec![from];
        nodes.extend(self.path(from, to)?.iter().map(|e| e.to));
        Ok(nodes)
    }

    /// Input bindings of the clause steps on `from -> to`, in order.
    pub fn input_bindings_on_path(&self, from: NodeId, to: NodeId) -> Result<Vec<(Var, Term)>, TreeError> {
        let mut out = Vec::new();
        for e in self.path(from, to)? {
            if let EdgeKind::Clause { input_bindings, .. } = &e.kind {
                out.extend(input_bindings.iter().cloned());
            }
        }
        Ok(out)
    }

    /// Whether the selected atom of `b` is an ancestor of the selected atom of `e`.
    pub fn is_ancestor(&self, b: NodeId, e: NodeId) -> bool {
        let mut cur = self.nodes[e].ancestor_of_selected;
        while let Some(n) = cur {
            if n == b {
                return true;
            }
            cur = self.nodes[n].ancestor_of_selected;
        }
        false
    }
}

struct Pending {
    parent: NodeId,
    kind: EdgeKind,
    goal: Vec<GoalAtom>,
}

struct Builder<'a> {
    program: &'a Program,
    cfg: TreeConfig,
    tree: ModedTree,
    next_gen: u32,
    next_uid: usize,
}

/// Build the moded SLD-tree of `query` with depth-first, left-most expansion.
pub fn build_tree(program: &Program, query: &ModedQuery, cfg: TreeConfig) -> ModedTree {
    let root = TreeNode {
        id: 0,
        goal: vec![GoalAtom { atom: query.atom.clone(), uid: 0, caller: None }],
        parent: None,
        in_edge: None,
        ancestor_of_selected: None,
        depth: 0,
        status: NodeStatus::Truncated,
    };
    let mut b = Builder {
        program,
        cfg,
        tree: ModedTree {
            nodes: vec![root],
            edges: Vec::new(),
            root: 0,
            cut_points: Vec::new(),
            truncated: false,
            query: query.clone(),
        },
        next_gen: 1,
        next_uid: 1,
    };
    let mut stack: Vec<Pending> = Vec::new();
    b.expand(0, &mut stack);
    while let Some(p) = stack.pop() {
        if b.tree.nodes.len() >= b.cfg.node_cap.max(1) {
            b.tree.truncated = true;
            break;
        }
        let id = b.tree.nodes.len();
        let ancestor_of_selected = p.goal.first().and_then(|g| g.caller).map(|(n, _)| n);
        let depth = b.tree.nodes[p.parent].depth + 1;
        b.tree.edges.push(Edge { from: p.parent, to: id, kind: p.kind });
        b.tree.nodes.push(TreeNode {
            id,
            goal: p.goal,
            parent: Some(p.parent),
            in_edge: Some(b.tree.edges.len() - 1),
            ancestor_of_selected,
            depth,
            status: NodeStatus::Truncated,
        });
        b.expand(id, &mut stack);
    }
    b.tree
}

fn relabel_goal(goal: &[GoalAtom], labels: &HashMap<crate::syntax::VarId, Label>) -> Vec<GoalAtom> {
    goal.iter().map(|g| GoalAtom { atom: g.atom.relabel(labels), ..g.clone() }).collect()
}

impl Builder<'_> {
    fn expand(&mut self, id: NodeId, stack: &mut Vec<Pending>) {
        let node = &self.tree.nodes[id];
        let Some(first) = node.goal.first().cloned() else {
            self.tree.nodes[id].status = NodeStatus::Success;
            return;
        };
        let rest = node.goal[1..].to_vec();
        let (name, arity) = first.atom.functor().expect("goal atoms are compound");
        let children = match goal_kind(name, arity) {
            GoalKind::Is => {
                let args = first.atom.args();
                match &args[0] {
                    Term::Var(v) if v.label == Label::Free && args[1].is_integer_expression() => {
                        let var = Var { id: v.id.clone(), label: Label::Integer };
                        let labels: HashMap<_, _> = [(v.id.clone(), Label::Integer)].into();
                        vec![Pending {
                            parent: id,
                            kind: EdgeKind::Cons { var, expr: args[1].clone() },
                            goal: relabel_goal(&rest, &labels),
                        }]
                    }
                    Term::Var(v) if v.label == Label::Free => {
                        return self.unsupported(id, format!("`{}` is not an integer expression", args[1]));
                    }
                    other => return self.unsupported(id, format!("`is` with non-free left side `{other}`")),
                }
            }
            GoalKind::Compare(_) => {
                let args = first.atom.args();
                if let Some(bad) = args.iter().find(|a| !a.is_integer_expression()) {
                    return self.unsupported(id, format!("`{bad}` is not an integer expression"));
                }
                vec![Pending { parent: id, kind: EdgeKind::Cond { cond: first.atom.clone() }, goal: rest }]
            }
            GoalKind::User => self.resolve(id, &first, &rest),
        };
        let node = &mut self.tree.nodes[id];
        node.status = if !children.is_empty() {
            NodeStatus::Expanded
        } else if self.tree.cut_points.last().is_some_and(|&(n, _)| n == id) {
            NodeStatus::Pruned
        } else {
            NodeStatus::Failed
        };
        stack.extend(children.into_iter().rev());
    }

    fn unsupported(&mut self, id: NodeId, why: String) {
        self.tree.nodes[id].status = NodeStatus::Unsupported(why);
    }

    fn resolve(&mut self, id: NodeId, first: &GoalAtom, rest: &[GoalAtom]) -> Vec<Pending> {
        let (name, arity) = first.atom.functor().unwrap();
        let mut out = Vec::new();
        for &ci in self.program.clauses_for(name, arity) {
            if self.loop_check_cuts(first, ci) {
                self.tree.cut_points.push((id, ci));
                continue;
            }
            let clause = self.program.clause(ci).renamed(self.next_gen);
            self.next_gen += 1;
            let Some(m) = moded_unify(&first.atom, &clause.head) else { continue };
            let mut goal = Vec::with_capacity(clause.body.len() + rest.len());
            for b in &clause.body {
                goal.push(GoalAtom { atom: m.apply(b), uid: self.next_uid, caller: Some((id, ci)) });
                self.next_uid += 1;
            }
            goal.extend(rest.iter().map(|g| GoalAtom { atom: m.apply(&g.atom), ..g.clone() }));
            out.push(Pending {
                parent: id,
                kind: EdgeKind::Clause { clause: ci, mgu: m.mgu, input_bindings: m.input_bindings },
                goal,
            });
        }
        out
    }

    fn loop_check_cuts(&self, atom: &GoalAtom, clause: usize) -> bool {
        let needed = self.cfg.rep.max(2) - 1;
        let mut found = 0;
        let mut cur = atom.caller;
        while let Some((n, c)) = cur {
            let anc = &self.tree.nodes[n].goal[0];
            if c == clause && is_expanded_variant(&atom.atom, &anc.atom) {
                found += 1;
                if found >= needed {
                    return true;
                }
            }
            cur = anc.caller;
        }
        false
    }
}
