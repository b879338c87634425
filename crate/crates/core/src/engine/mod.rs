//! Moded SLD-trees, unification and the concrete interpreter.

mod concrete;
pub mod dump;
mod loopcheck;
mod tree;
mod unify;

pub use concrete::{eval, run_concrete, run_concrete_detailed, ConcreteOutcome, ConcreteRun};
pub use loopcheck::is_expanded_variant;
pub use tree::{build_tree, Edge, EdgeKind, GoalAtom, ModedTree, NodeId, NodeStatus, TreeConfig, TreeError, TreeNode};
pub use unify::{moded_unify, unify, unify_by, ModedMgu, Orient};
