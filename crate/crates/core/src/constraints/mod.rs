//! Constraint generation: from loop candidates to diophantine systems.

pub mod expr;
pub mod generate;
pub mod normalize;
pub mod poly;

pub use expr::{IntCondition, IntExpr, Sym};
pub use generate::{
    add_domain_symbols, apply_cons, apply_cons_expr, build_implication, reachability, replace, symbolic_system,
    to_natural_form, GenError, Implication, LoopVar, SymbolicSystem,
};
pub use normalize::{
    absolute_positiveness, diophantine_system, eliminate_implication, ge_form, normalize, ConstraintKind,
    DioConstraint, DiophantineSystem, GeImplication, GePair, NormalBranch, PremTemplate,
};
pub use poly::{Monomial, Overflow, Poly};
