//! DOT and JSON renderings of a moded tree.

use serde_json::{json, Value};

use super::tree::{EdgeKind, ModedTree, NodeStatus};
use crate::syntax::goal_string;

fn status_name(s: &NodeStatus) -> &'static str {
    match s {
        NodeStatus::Expanded => "expanded",
        NodeStatus::Success => "success",
        NodeStatus::Failed => "failed",
        NodeStatus::Pruned => "pruned",
        NodeStatus::Unsupported(_) => "unsupported",
        NodeStatus::Truncated => "truncated",
    }
}

fn edge_label(kind: &EdgeKind) -> String {
    match kind {
        EdgeKind::Clause { clause, input_bindings, .. } => {
            let mut s = format!("C{}", clause + 1);
            if !input_bindings.is_empty() {
                let b: Vec<String> = input_bindings.iter().map(|(v, t)| format!("{}\\{}", v.id, t.moded())).collect();
                s.push_str(&format!(" {{{}}}", b.join(", ")));
            }
            s
        }
        EdgeKind::Cons { .. } => "cons".into(),
        EdgeKind::Cond { .. } => "cond".into(),
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; clause numbers are 1-based, cut clauses appear as dashed stubs.
pub fn to_dot(tree: &ModedTree) -> String {
    let mut out = String::from("digraph moded_tree {\n  node [shape=box, fontname=\"monospace\"];\n");
    for n in &tree.nodes {
        let goal = if n.goal.is_empty() { "□".to_string() } else { goal_string(&n.goal_terms(), true) };
        let mut label = format!("N{}: {}", n.id, goal);
        if let NodeStatus::Unsupported(why) = &n.status {
            label.push_str(&format!("\\n(unsupported: {why})"));
        }
        out.push_str(&format!("  n{} [label=\"{}\"];\n", n.id, dot_escape(&label).replace("\\\\n(", "\\n(")));
    }
    for e in &tree.edges {
        out.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", e.from, e.to, dot_escape(&edge_label(&e.kind))));
    }
    for (i, (node, clause)) in tree.cut_points.iter().enumerate() {
        out.push_str(&format!("  cut{i} [shape=plaintext, label=\"cut C{}\"];\n", clause + 1));
        out.push_str(&format!("  n{node} -> cut{i} [style=dashed];\n"));
    }
    out.push_str("}\n");
    out
}

pub fn to_json(tree: &ModedTree) -> Value {
    let nodes: Vec<Value> = tree
        .nodes
        .iter()
        .map(|n| {
            let mut v = json!({
                "id": n.id,
                "goal": n.goal.iter().map(|g| g.atom.moded()).collect::<Vec<_>>(),
                "parent": n.parent,
                "ancestor_of_selected": n.ancestor_of_selected,
                "depth": n.depth,
                "status": status_name(&n.status),
            });
            if let NodeStatus::Unsupported(why) = &n.status {
                v["reason"] = json!(why);
            }
            v
        })
        .collect();
    let edges: Vec<Value> = tree
        .edges
        .iter()
        .map(|e| match &e.kind {
            EdgeKind::Clause { clause, mgu, input_bindings } => json!({
                "from": e.from, "to": e.to, "kind": "clause", "clause": clause + 1,
                "mgu": mgu.iter().map(|(v, t)| json!([v.to_string(), t.moded()])).collect::<Vec<_>>(),
                "input_bindings": input_bindings.iter().map(|(v, t)| json!([v.id.to_string(), t.moded()])).collect::<Vec<_>>(),
            }),
            EdgeKind::Cons { var, expr } => json!({
                "from": e.from, "to": e.to, "kind": "cons", "var": var.id.to_string(), "expr": expr.moded(),
            }),
            EdgeKind::Cond { cond } => json!({
                "from": e.from, "to": e.to, "kind": "cond", "cond": cond.moded(),
            }),
        })
        .collect();
    json!({
        "query": tree.query.atom.moded(),
        "nodes": nodes,
        "edges": edges,
        "cut_points": tree.cut_points.iter().map(|(n, c)| json!({"node": n, "clause": c + 1})).collect::<Vec<_>>(),
        "truncated": tree.truncated,
    })
}
