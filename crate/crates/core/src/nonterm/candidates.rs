use crate::engine::{EdgeKind, ModedTree, NodeId};
use crate::syntax::ops::{goal_kind, GoalKind};
use crate::syntax::{ModedQuery, Subst, Term};

use super::relations::check_pair;

/// A path `begin -> end` that can be repeated for every query of `class_query`,
/// up to the failure of an integer condition.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopCandidate {
    pub begin: NodeId,
    pub end: NodeId,
    /// The query with all input bindings from the root to `begin` applied.
    pub class_query: ModedQuery,
    /// Nodes on `root -> end` whose outgoing edge is an integer condition, ascending.
    pub cond_nodes: Vec<NodeId>,
}

impl LoopCandidate {
    /// Condition nodes before `begin`.
    pub fn prefix_cond_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.cond_nodes.iter().copied().filter(|&n| n < self.begin)
    }

    /// Condition nodes inside the loop `begin -> end`.
    pub fn loop_cond_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.cond_nodes.iter().copied().filter(|&n| n >= self.begin)
    }
}

fn is_user_atom(t: Option<&Term>) -> bool {
    t.and_then(Term::functor).is_some_and(|(n, a)| goal_kind(n, a) == GoalKind::User)
}

/// Substitute the definitions of integer constructors on `root -> node`
/// until no defined variable remains. Cyclic definitions stop after one
/// round per definition.
pub fn expand_cons_definitions(tree: &ModedTree, node: NodeId, t: &Term) -> Term {
    let defs: Subst = tree
        .path(tree.root, node)
        .expect("node is in the tree")
        .into_iter()
        .filter_map(|e| match &e.kind {
            EdgeKind::Cons { var, expr } => Some((var.id.clone(), expr.clone())),
            _ => None,
        })
        .collect();
    let mut cur = t.clone();
    for _ in 0..=defs.len() {
        let next = cur.apply(&defs);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// The query restricted by the input bindings on `root -> node`.
pub fn class_query(tree: &ModedTree, node: NodeId) -> ModedQuery {
    let mut atom = tree.query.atom.clone();
    for (v, t) in tree.input_bindings_on_path(tree.root, node).expect("node is in the tree") {
        let single: Subst = std::iter::once((v.id, t)).collect();
        atom = atom.apply(&single);
    }
    let atom = expand_cons_definitions(tree, node, &atom);
    ModedQuery { atom, source_text: tree.query.source_text.clone() }
}

/// All node pairs satisfying the loop conditions, ordered by `(begin, end)`.
pub fn find_candidates(tree: &ModedTree) -> Vec<LoopCandidate> {
    let mut out = Vec::new();
    for e in 0..tree.nodes.len() {
        let end_atom = tree.nodes[e].selected();
        if !is_user_atom(end_atom) {
            continue;
        }
        let mut b = tree.nodes[e].ancestor_of_selected;
        while let Some(begin) = b {
            b = tree.nodes[begin].ancestor_of_selected;
            let begin_atom = tree.nodes[begin].selected();
            if !tree.input_bindings_on_path(begin, e).is_ok_and(|v| v.is_empty()) {
                continue;
            }
            if check_pair(end_atom.unwrap(), begin_atom.unwrap()) {
                let cond_nodes = tree
                    .path(tree.root, e)
                    .unwrap()
                    .iter()
                    .filter(|edge| matches!(edge.kind, EdgeKind::Cond { .. }))
                    .map(|edge| edge.from)
                    .collect();
                out.push(LoopCandidate { begin, end: e, class_query: class_query(tree, begin), cond_nodes });
            }
        }
    }
    out.sort_by_key(|c| (c.begin, c.end));
    out
}
