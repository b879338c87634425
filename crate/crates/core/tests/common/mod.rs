//! Independent oracles and generators shared by the property and acceptance tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use looper_core::analysis::SolvedCandidate;
use looper_core::constraints::{ConstraintKind, DiophantineSystem, Sym};
use looper_core::syntax::{Clause, Label, Program, Term, Var, VarId};
use looper_core::IntPoly;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn program_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(name)
}

// ---------------------------------------------------------------------------
// Denotations over the signature {a/0, f/1}

/// Ground terms `a, f(a), f(f(a)), ...` up to `depth` nested applications.
pub fn ground_terms(depth: usize) -> Vec<Term> {
    let mut out = vec![Term::atom("a")];
    for _ in 0..depth {
        let last = out.last().unwrap().clone();
        out.push(Term::app("f", vec![last]));
    }
    out
}

/// One-way matching: extend `theta` so that `pattern` instantiated by it equals `target`.
pub fn matches(pattern: &Term, target: &Term, theta: &mut HashMap<VarId, Term>) -> bool {
    match pattern {
        Term::Var(v) => match theta.get(&v.id) {
            Some(t) => t == target,
            None => {
                theta.insert(v.id.clone(), target.clone());
                true
            }
        },
        Term::Int(i) => matches!(target, Term::Int(j) if i == j),
        Term::App(f, args) => match target {
            Term::App(g, targs) if f == g && args.len() == targs.len() => {
                args.iter().zip(targs).all(|(p, t)| matches(p, t, theta))
            }
            _ => false,
        },
    }
}

fn strip(t: &Term) -> Term {
    t.unlabelled()
}

fn input_ids(t: &Term) -> Vec<VarId> {
    let mut ids: Vec<VarId> = t.vars().into_iter().filter(|v| v.is_input()).map(|v| v.id).collect();
    ids.sort_by(|a, b| (a.name.as_ref(), a.gen).cmp(&(b.name.as_ref(), b.gen)));
    ids.dedup();
    ids
}

fn instances(t: &Term, terms: &[Term]) -> Vec<Term> {
    let ids = input_ids(t);
    let mut out = Vec::new();
    let mut idx = vec![0usize; ids.len()];
    loop {
        let s = ids.iter().cloned().zip(idx.iter().map(|&i| terms[i].clone())).collect();
        out.push(strip(&t.apply(&s)));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < terms.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Bounded check of: every instance of `a` (inputs up to depth `da`) is more
/// general than some instance of `b` (inputs up to depth `db`).
pub fn brute_force_more_general(a: &Term, b: &Term, da: usize, db: usize) -> bool {
    let a = a.with_generation(1);
    let b = b.with_generation(2);
    let bs = instances(&b, &ground_terms(db));
    instances(&a, &ground_terms(da)).iter().all(|i| bs.iter().any(|j| matches(i, j, &mut HashMap::new())))
}

fn random_term(rng: &mut impl Rng, vars: &[Term], depth: usize) -> Term {
    match rng.gen_range(0..if depth == 0 { 2 } else { 3 }) {
        0 => vars.choose(rng).unwrap().clone(),
        1 => Term::atom("a"),
        _ => Term::app("f", vec![random_term(rng, vars, depth - 1)]),
    }
}

fn random_vars(rng: &mut impl Rng, prefix: &str) -> Vec<Term> {
    ["X", "Y", "Z"]
        .iter()
        .map(|n| {
            let label = if rng.gen_bool(0.5) { Label::Input } else { Label::Free };
            Term::Var(Var::new(&format!("{prefix}{n}"), label))
        })
        .collect()
}

/// A pair of binary atoms over {a, f}; half the time the second is built
/// from the first so the relation holds more often.
pub fn random_atom_pair(rng: &mut impl Rng) -> (Term, Term) {
    let va = random_vars(rng, "A");
    let a = Term::app("p", (0..2).map(|_| random_term(rng, &va, 2)).collect());
    let b = if rng.gen_bool(0.5) {
        let vb = random_vars(rng, "B");
        Term::app("p", (0..2).map(|_| random_term(rng, &vb, 2)).collect())
    } else {
        let vb = random_vars(rng, "B");
        let s = a
            .vars()
            .into_iter()
            .map(|v| (v.id, if rng.gen_bool(0.3) { random_term(rng, &vb, 1) } else { vb.choose(rng).unwrap().clone() }))
            .collect();
        strip_labels_into(&a.apply(&s), &vb)
    };
    (a, b)
}

fn strip_labels_into(t: &Term, vars: &[Term]) -> Term {
    let labels: HashMap<VarId, Label> =
        vars.iter().filter_map(|v| v.as_var().map(|v| (v.id.clone(), v.label))).collect();
    t.relabel(&labels)
}

// ---------------------------------------------------------------------------
// Random programs

const PREDS: [(&str, usize); 3] = [("p", 1), ("q", 2), ("r", 2)];

fn random_arg(rng: &mut impl Rng, vars: &[Term], depth: usize) -> Term {
    match rng.gen_range(0..6) {
        0..=2 => vars.choose(rng).unwrap().clone(),
        3 => Term::int(rng.gen_range(-2..3)),
        4 if depth > 0 => Term::app("s", vec![random_arg(rng, vars, depth - 1)]),
        _ => Term::binary("+", vars.choose(rng).unwrap().clone(), Term::int(1)),
    }
}

fn random_goal(rng: &mut impl Rng, vars: &[Term]) -> Term {
    let pick = |rng: &mut _| -> Term { vars.choose(rng).unwrap().clone() };
    match rng.gen_range(0..10) {
        0 => Term::binary("is", pick(rng), Term::binary("+", pick(rng), Term::int(rng.gen_range(-1..2)))),
        1 => Term::binary(
            ["<", ">", "=<", ">=", "=:=", "=\\="][rng.gen_range(0..6)],
            pick(rng),
            random_arg(rng, vars, 0),
        ),
        2 => Term::binary("=", pick(rng), random_arg(rng, vars, 1)),
        _ => {
            let (name, arity) = PREDS[rng.gen_range(0..PREDS.len())];
            Term::app(name, (0..arity).map(|_| random_arg(rng, vars, 1)).collect())
        }
    }
}

/// Up to five clauses over p/1, q/2, r/2 with up to three body goals.
pub fn random_program(rng: &mut impl Rng) -> Program {
    let vars: Vec<Term> = ["A", "B", "C", "D"].iter().map(|n| Term::var(n)).collect();
    let n = rng.gen_range(1..=5);
    let clauses = (0..n)
        .map(|_| {
            let (name, arity) = PREDS[rng.gen_range(0..PREDS.len())];
            let head = Term::app(name, (0..arity).map(|_| random_arg(rng, &vars, 1)).collect());
            let body = (0..rng.gen_range(0..=3)).map(|_| random_goal(rng, &vars)).collect();
            Clause { head, body }
        })
        .collect();
    Program::new(clauses)
}

pub fn random_query_atom(rng: &mut impl Rng) -> Term {
    let (name, arity) = PREDS[rng.gen_range(0..PREDS.len())];
    let labels = [Label::Free, Label::Input, Label::Integer];
    Term::app(name, (0..arity).map(|i| Term::Var(Var::new(&format!("Q{i}"), *labels.choose(rng).unwrap()))).collect())
}

// ---------------------------------------------------------------------------
// Diophantine systems

pub fn query_sym(i: usize) -> Sym {
    Sym::Query(format!("x{i}"))
}

/// Up to four constraints over `n` symbols, degree at most two.
pub fn random_system(rng: &mut impl Rng, n: usize) -> DiophantineSystem {
    let mut sys = DiophantineSystem::new();
    for i in 0..n {
        sys.symbols.insert(query_sym(i));
    }
    for _ in 0..rng.gen_range(1..=4) {
        let mut p = IntPoly::int(rng.gen_range(-6..=6));
        for _ in 0..rng.gen_range(1..=3) {
            let mut m = IntPoly::int(rng.gen_range(-3..=3));
            for _ in 0..rng.gen_range(1..=2) {
                m = m.mul(&IntPoly::var(query_sym(rng.gen_range(0..n))));
            }
            p = p.add(&m);
        }
        if rng.gen_bool(0.3) {
            sys.push_eq(p, "random");
        } else {
            sys.push_ge(p, "random");
        }
    }
    sys
}

/// Direct evaluation of a constraint, independent of the library's evaluator.
fn holds(p: &IntPoly, kind: ConstraintKind, vals: &[i64]) -> bool {
    let mut total: i64 = 0;
    for (m, c) in p.terms() {
        let mut v: i64 = c.try_into().unwrap();
        for (s, e) in m.factors() {
            let Sym::Query(name) = s else { panic!("unexpected symbol {s}") };
            let i: usize = name[1..].parse().unwrap();
            v *= vals[i].pow(*e);
        }
        total += v;
    }
    match kind {
        ConstraintKind::Ge => total >= 0,
        ConstraintKind::Eq => total == 0,
    }
}

/// Search `[-7, 7]^n` for a model.
pub fn exhaustive_model(sys: &DiophantineSystem, n: usize) -> Option<Vec<i64>> {
    let mut vals = vec![-7i64; n];
    loop {
        if sys.constraints.iter().all(|c| holds(&c.poly, c.kind, &vals)) {
            return Some(vals);
        }
        let mut k = 0;
        loop {
            if k == n {
                return None;
            }
            vals[k] += 1;
            if vals[k] <= 7 {
                break;
            }
            vals[k] = -7;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Implication sampling

/// Evaluate each single-conclusion implication of a solved candidate at
/// `samples` random points of the naturals (coordinates up to 100).
/// Returns (violations, samples whose premises all held).
pub fn sample_implications(s: &SolvedCandidate, samples: usize, rng: &mut impl Rng) -> (usize, usize) {
    let mut violations = 0;
    let mut non_vacuous = 0;
    let base: HashMap<Sym, BigInt> = s.model.as_map();
    for imp in &s.branch.implications {
        for _ in 0..samples {
            let mut vals = base.clone();
            for n in &s.branch.nat_vars {
                vals.insert(n.clone(), BigInt::from(rng.gen_range(0..=100)));
            }
            let ge = |l: &IntPoly, r: &IntPoly| l.eval(&vals).unwrap() >= r.eval(&vals).unwrap();
            if imp.premises.iter().all(|p| ge(&p.lhs, &p.rhs)) {
                non_vacuous += 1;
                if !ge(&imp.conclusion.lhs, &imp.conclusion.rhs) {
                    violations += 1;
                }
            }
        }
    }
    (violations, non_vacuous)
}
