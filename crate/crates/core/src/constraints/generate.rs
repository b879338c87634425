//! From a loop candidate to a symbolic system over the query's integers.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::expr::{IntCondition, IntExpr, Sym};
use crate::engine::{EdgeKind, ModedTree, NodeId, TreeError};
use crate::nonterm::{positions, subterm, LoopCandidate};
use crate::syntax::{CmpOp, Term, Var, VarId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("no subterm at the position of `{0}` in the end atom")]
    PositionMismatch(String),
    /// The candidate falls outside what the constraint phase can express.
    #[error("{0}")]
    Unsupported(String),
}

/// A universally quantified implication `premises => conclusions`.
#[derive(Clone, Debug, PartialEq)]
pub struct Implication {
    pub vars: Vec<Sym>,
    pub premises: Vec<IntCondition>,
    pub conclusions: Vec<IntCondition>,
}

/// An integer variable of the loop's first atom.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopVar {
    pub var: VarId,
    /// Short name used for its symbols (`c_<name>`, `d_<name>`, `nat_<name>`).
    pub name: String,
    /// Its value in the next iteration, over the loop variables.
    pub next: IntExpr,
    /// Its first-iteration value, over the query symbols.
    pub initial: IntExpr,
}

impl LoopVar {
    pub fn sym(&self) -> Sym {
        Sym::Var(self.var.clone())
    }

    pub fn lower(&self) -> Sym {
        Sym::Lower(self.name.clone())
    }

    pub fn dir(&self) -> Sym {
        Sym::Dir(self.name.clone())
    }

    pub fn nat(&self) -> Sym {
        Sym::Nat(self.name.clone())
    }
}

/// Reachability conditions, domain links and the loop implication.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicSystem {
    /// Conditions over the query symbols making the path applicable.
    pub reachability: Vec<IntCondition>,
    /// `c_I =:= initial value of I`.
    pub linking: Vec<IntCondition>,
    /// `d_I >= -1`, `d_I =< 1`.
    pub ranges: Vec<IntCondition>,
    pub implication: Implication,
    pub loop_vars: Vec<LoopVar>,
    /// Query integer variables and their symbols, in argument order.
    pub query_symbols: Vec<(VarId, Sym)>,
}

fn sym_of(v: &VarId) -> Sym {
    Sym::Var(v.clone())
}

/// Integer constructor definitions on the path `from -> to`.
fn cons_defs(tree: &ModedTree, from: NodeId, to: NodeId) -> Result<HashMap<Sym, IntExpr>, TreeError> {
    let mut defs = HashMap::new();
    for e in tree.path(from, to)? {
        if let EdgeKind::Cons { var, expr } = &e.kind {
            let expr = IntExpr::from_term(expr).expect("constructor right sides are integer expressions");
            defs.insert(sym_of(&var.id), expr);
        }
    }
    Ok(defs)
}

/// Replace every variable defined by an integer constructor on `ni -> nj` by its definition.
pub fn apply_cons_expr(tree: &ModedTree, e: &IntExpr, ni: NodeId, nj: NodeId) -> Result<IntExpr, GenError> {
    Ok(e.substitute_fixpoint(&cons_defs(tree, ni, nj)?))
}

pub fn apply_cons(tree: &ModedTree, c: &IntCondition, ni: NodeId, nj: NodeId) -> Result<IntCondition, GenError> {
    let defs = cons_defs(tree, ni, nj)?;
    Ok(c.map(|e| e.substitute_fixpoint(&defs)))
}

fn integer_vars(t: &Term) -> Vec<Var> {
    t.vars().into_iter().filter(Var::is_integer).collect()
}

fn first_position(atom: &Term, v: &VarId) -> Option<Vec<usize>> {
    positions(atom).into_iter().find(|p| matches!(subterm(p, atom), Ok(Term::Var(x)) if &x.id == v))
}

fn selected(tree: &ModedTree, n: NodeId) -> &Term {
    tree.node(n).selected().expect("candidate nodes have a selected atom")
}

/// Substitute each integer variable of the selected atom at `ni` by the
/// subterm at the same position of the selected atom at `nj`.
pub fn replace(
    tree: &ModedTree,
    conds: &[IntCondition],
    ni: NodeId,
    nj: NodeId,
) -> Result<Vec<IntCondition>, GenError> {
    let (ai, aj) = (selected(tree, ni), selected(tree, nj));
    let mut map = HashMap::new();
    for v in integer_vars(ai) {
        let pos = first_position(ai, &v.id).expect("variable occurs in its atom");
        let t = subterm(&pos, aj).map_err(|_| GenError::PositionMismatch(v.id.to_string()))?;
        let e = IntExpr::from_term(t).ok_or_else(|| GenError::PositionMismatch(v.id.to_string()))?;
        map.insert(sym_of(&v.id), e);
    }
    Ok(conds.iter().map(|c| c.map(|e| e.substitute(&map))).collect())
}

fn cond_at(tree: &ModedTree, n: NodeId) -> IntCondition {
    let edge = tree.children(n).first().and_then(|&c| tree.edge_into(c)).cloned();
    match edge.map(|e| e.kind) {
        Some(EdgeKind::Cond { cond }) => {
            IntCondition::from_term(&cond).expect("recorded conditions are integer conditions").with_origin(Some(n))
        }
        _ => panic!("node {n} is not a condition node"),
    }
}

/// Translation of tree integer variables into the symbols of the restricted query.
struct QueryScope {
    subst: HashMap<Sym, IntExpr>,
    /// Equalities forced by input bindings of constructor-defined variables.
    extra: Vec<IntCondition>,
    query_symbols: Vec<(VarId, Sym)>,
}

impl QueryScope {
    fn new(tree: &ModedTree, cand: &LoopCandidate) -> Result<QueryScope, GenError> {
        let defs = cons_defs(tree, tree.root, cand.end)?;
        let mut subst = defs.clone();
        let mut extra = Vec::new();
        for (v, t) in tree.input_bindings_on_path(tree.root, cand.begin)? {
            let key = sym_of(&v.id);
            let Some(e) = IntExpr::from_term(&t).filter(|_| t.is_integer_expression()) else {
                if v.is_integer() {
                    return Err(GenError::Unsupported(format!("integer variable {} bound to `{}`", v.id, t)));
                }
                continue;
            };
            if defs.contains_key(&key) {
                extra.push(IntCondition::new(IntExpr::sym(key), CmpOp::Eq, e));
            } else {
                subst.entry(key).or_insert(e);
            }
        }
        let query_symbols = integer_vars(&cand.class_query.atom)
            .into_iter()
            .map(|v| {
                let name = v.id.to_string().to_lowercase();
                (v.id, Sym::Query(name))
            })
            .collect();
        let mut scope = QueryScope { subst, extra: Vec::new(), query_symbols };
        scope.extra = extra.iter().map(|c| scope.condition(c)).collect::<Result<_, _>>()?;
        Ok(scope)
    }

    fn expr(&self, e: &IntExpr) -> Result<IntExpr, GenError> {
        let mut cur = e.clone();
        for _ in 0..=self.subst.len() {
            if !cur.syms().iter().any(|s| self.subst.contains_key(s)) {
                let rename: HashMap<Sym, IntExpr> =
                    self.query_symbols.iter().map(|(v, s)| (sym_of(v), IntExpr::sym(s.clone()))).collect();
                let out = cur.substitute(&rename);
                if let Some(stray) = out.syms().into_iter().find(|s| matches!(s, Sym::Var(_))) {
                    return Err(GenError::Unsupported(format!("`{stray}` is not determined by the query")));
                }
                return Ok(out);
            }
            cur = cur.substitute(&self.subst);
        }
        Err(GenError::Unsupported("cyclic integer bindings".into()))
    }

    fn condition(&self, c: &IntCondition) -> Result<IntCondition, GenError> {
        Ok(IntCondition { lhs: self.expr(&c.lhs)?, op: c.op, rhs: self.expr(&c.rhs)?, origin: c.origin })
    }
}

/// Conditions on the path `root -> end`, over the query symbols.
pub fn reachability(tree: &ModedTree, cand: &LoopCandidate) -> Result<Vec<IntCondition>, GenError> {
    let scope = QueryScope::new(tree, cand)?;
    reachability_in(tree, cand, &scope)
}

fn reachability_in(tree: &ModedTree, cand: &LoopCandidate, scope: &QueryScope) -> Result<Vec<IntCondition>, GenError> {
    let mut out = Vec::new();
    for n in cand.cond_nodes.iter().copied() {
        let c = apply_cons(tree, &cond_at(tree, n), tree.root, n)?;
        out.push(scope.condition(&c)?);
    }
    out.extend(scope.extra.iter().cloned());
    Ok(out)
}

fn loop_vars(tree: &ModedTree, cand: &LoopCandidate, scope: &QueryScope) -> Result<Vec<LoopVar>, GenError> {
    let (ab, ae) = (selected(tree, cand.begin), selected(tree, cand.end));
    let mut out = Vec::new();
    for v in integer_vars(ab) {
        let pos = first_position(ab, &v.id).expect("variable occurs in its atom");
        let t = subterm(&pos, ae).map_err(|_| GenError::PositionMismatch(v.id.to_string()))?;
        let e = IntExpr::from_term(t).ok_or_else(|| GenError::PositionMismatch(v.id.to_string()))?;
        let next = apply_cons_expr(tree, &e, cand.begin, cand.end)?;
        let initial = scope.expr(&apply_cons_expr(tree, &IntExpr::sym(sym_of(&v.id)), tree.root, cand.begin)?)?;
        out.push(LoopVar { name: v.id.to_string(), var: v.id, next, initial });
    }
    Ok(out)
}

/// The loop implication over the integer variables of the first atom.
pub fn build_implication(tree: &ModedTree, cand: &LoopCandidate) -> Result<Implication, GenError> {
    let ab = selected(tree, cand.begin);
    let vars: Vec<Sym> = integer_vars(ab).iter().map(|v| sym_of(&v.id)).collect();
    let allowed: BTreeSet<Sym> = vars.iter().cloned().collect();
    let mut premises = Vec::new();
    for n in cand.loop_cond_nodes() {
        let p = apply_cons(tree, &cond_at(tree, n), cand.begin, n)?;
        if let Some(stray) = p.syms().into_iter().find(|s| !allowed.contains(s)) {
            return Err(GenError::Unsupported(format!(
                "condition `{p}` depends on `{stray}`, which is not an argument of the loop atom"
            )));
        }
        premises.push(p);
    }
    let conclusions = replace(tree, &premises, cand.begin, cand.end)?
        .iter()
        .map(|c| apply_cons(tree, c, cand.begin, cand.end))
        .collect::<Result<_, _>>()?;
    Ok(Implication { vars, premises, conclusions })
}

fn dsym(s: Sym) -> IntExpr {
    IntExpr::sym(s)
}

/// Add the domain symbols `c_I`, `d_I` for every loop integer and link them to the query.
pub fn add_domain_symbols(
    tree: &ModedTree,
    cand: &LoopCandidate,
    imp: Implication,
) -> Result<SymbolicSystem, GenError> {
    let scope = QueryScope::new(tree, cand)?;
    let reach = reachability_in(tree, cand, &scope)?;
    let vars = loop_vars(tree, cand, &scope)?;
    let mut imp = imp;
    let (mut linking, mut ranges) = (Vec::new(), Vec::new());
    for lv in &vars {
        let (c, d) = (dsym(lv.lower()), dsym(lv.dir()));
        let this = dsym(lv.sym());
        imp.premises.push(IntCondition::new(
            IntExpr::mul(d.clone(), this),
            CmpOp::Ge,
            IntExpr::mul(d.clone(), c.clone()),
        ));
        imp.conclusions.push(IntCondition::new(
            IntExpr::mul(d.clone(), lv.next.clone()),
            CmpOp::Ge,
            IntExpr::mul(d.clone(), c.clone()),
        ));
        let guard = IntExpr::sub(IntExpr::int(1), IntExpr::mul(d.clone(), d.clone()));
        imp.conclusions.push(IntCondition::new(
            IntExpr::mul(guard.clone(), lv.next.clone()),
            CmpOp::Eq,
            IntExpr::mul(guard, c.clone()),
        ));
        ranges.push(IntCondition::new(d.clone(), CmpOp::Ge, IntExpr::int(-1)));
        ranges.push(IntCondition::new(d, CmpOp::Le, IntExpr::int(1)));
        linking.push(IntCondition::new(c, CmpOp::Eq, lv.initial.clone()));
    }
    Ok(SymbolicSystem {
        reachability: reach,
        linking,
        ranges,
        implication: imp,
        loop_vars: vars,
        query_symbols: scope.query_symbols,
    })
}

/// Replace every loop integer `I` by `c_I + d_I * nat_I`, with `nat_I` ranging over naturals.
pub fn to_natural_form(s: &SymbolicSystem) -> SymbolicSystem {
    let map: HashMap<Sym, IntExpr> = s
        .loop_vars
        .iter()
        .map(|lv| (lv.sym(), IntExpr::add(dsym(lv.lower()), IntExpr::mul(dsym(lv.dir()), dsym(lv.nat())))))
        .collect();
    let conv = |cs: &[IntCondition]| cs.iter().map(|c| c.map(|e| e.substitute(&map))).collect::<Vec<_>>();
    SymbolicSystem {
        implication: Implication {
            vars: s.loop_vars.iter().map(LoopVar::nat).collect(),
            premises: conv(&s.implication.premises),
            conclusions: conv(&s.implication.conclusions),
        },
        ..s.clone()
    }
}

/// Full symbolic pipeline for one candidate.
pub fn symbolic_system(tree: &ModedTree, cand: &LoopCandidate) -> Result<SymbolicSystem, GenError> {
    let imp = build_implication(tree, cand)?;
    add_domain_symbols(tree, cand, imp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_tree, TreeConfig};
    use crate::nonterm::find_candidates;
    use crate::syntax::SourceFile;

    fn setup(src: &str) -> (ModedTree, LoopCandidate) {
        let file = SourceFile::parse(src).unwrap();
        let query = file.query().unwrap();
        let tree = build_tree(&file.program, &query, TreeConfig::default());
        let cand = find_candidates(&tree).into_iter().next().expect("a candidate");
        (tree, cand)
    }

    fn strings(cs: &[IntCondition]) -> Vec<String> {
        cs.iter().map(ToString::to_string).collect()
    }

    const COUNT_TO: &str = "count_to(N,L) :- count(0,N,L).\n\
        count(N,N,[N]).\n\
        count(M,N,[M|L]) :- M > N, M1 is M+1, count(M1,N,L).\n\
        :- nt_query(count_to(+int,-)).\n";

    const CONSTANTS: &str = "constants(I,J) :- I =:= 2, In is J*2, Jn is I-J, constants(In,Jn).\n\
        :- nt_query(constants(+int,+int)).\n";

    #[test]
    fn count_to_pipeline() {
        let (tree, cand) = setup(COUNT_TO);
        assert_eq!((cand.begin, cand.end), (5, 9));
        let reach = reachability(&tree, &cand).unwrap();
        assert_eq!(strings(&reach), ["0 > n", "0 + 1 > n"]);
        let imp = build_implication(&tree, &cand).unwrap();
        assert_eq!(imp.premises.len(), 1);
        assert_eq!(imp.conclusions.len(), 1);
        let sys = add_domain_symbols(&tree, &cand, imp).unwrap();
        assert_eq!(sys.loop_vars.len(), 2);
        let linking = strings(&sys.linking);
        assert_eq!(linking.len(), 2);
        assert!(linking.iter().any(|l| l.ends_with("=:= 0 + 1")), "{linking:?}");
        assert!(linking.iter().any(|l| l.ends_with("=:= n")), "{linking:?}");
        assert_eq!(sys.ranges.len(), 4);
        // one domain premise and two domain conclusions per loop variable
        assert_eq!(sys.implication.premises.len(), 3);
        assert_eq!(sys.implication.conclusions.len(), 5);
        let nat = to_natural_form(&sys);
        assert!(nat.implication.vars.iter().all(|s| matches!(s, Sym::Nat(_))));
        for c in nat.implication.premises.iter().chain(&nat.implication.conclusions) {
            assert!(c.syms().iter().all(|s| !matches!(s, Sym::Var(_))), "{c}");
        }
    }

    #[test]
    fn count_to_implication_shape() {
        let (tree, cand) = setup(COUNT_TO);
        let imp = build_implication(&tree, &cand).unwrap();
        let values = |m: i64, n: i64| -> HashMap<Sym, num_bigint::BigInt> {
            imp.vars.iter().cloned().zip([m.into(), n.into()]).collect()
        };
        // premise is M > N, conclusion is M + 1 > N
        for (m, n) in [(3, 1), (0, 0), (-2, 5)] {
            assert_eq!(imp.premises[0].eval(&values(m, n)), Some(m > n));
            assert_eq!(imp.conclusions[0].eval(&values(m, n)), Some(m + 1 > n));
        }
    }

    #[test]
    fn constants_pipeline() {
        let (tree, cand) = setup(CONSTANTS);
        assert_eq!((cand.begin, cand.end), (0, 4));
        assert_eq!(strings(&reachability(&tree, &cand).unwrap()), ["i =:= 2"]);
        let imp = build_implication(&tree, &cand).unwrap();
        assert_eq!(strings(&imp.premises), ["I =:= 2"]);
        assert_eq!(strings(&imp.conclusions), ["J * 2 =:= 2"]);
        let sys = add_domain_symbols(&tree, &cand, imp).unwrap();
        assert_eq!(strings(&sys.linking), ["c_I =:= i", "c_J =:= j"]);
        let next: Vec<String> = sys.loop_vars.iter().map(|l| l.next.to_string()).collect();
        assert_eq!(next, ["J * 2", "I - J"]);
    }

    #[test]
    fn replace_maps_positions() {
        let (tree, cand) = setup(CONSTANTS);
        let c = IntCondition::new(IntExpr::sym(sym_of(&VarId::new("J", 0))), CmpOp::Gt, IntExpr::int(0));
        let imp = build_implication(&tree, &cand).unwrap();
        let j = imp.vars[1].clone();
        let c = IntCondition { lhs: IntExpr::sym(j), ..c };
        let out = replace(&tree, &[c], cand.begin, cand.end).unwrap();
        // J sits at the second argument, where the end atom has Jn
        assert!(out[0].to_string().starts_with("Jn"), "{}", out[0]);
    }
}
