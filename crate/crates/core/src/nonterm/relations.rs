//! Moded-more-general and integer-similar relations between moded atoms.

use std::sync::Arc;

use thiserror::Error;

use crate::engine::{unify_by, Orient};
use crate::syntax::{Subst, Term, Var, VarId};

/// A 1-based argument path into a term.
pub type Position = Vec<usize>;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("position {position:?} is not valid in `{term}`")]
pub struct InvalidPosition {
    pub position: Position,
    pub term: String,
}

pub fn subterm<'t>(position: &[usize], t: &'t Term) -> Result<&'t Term, InvalidPosition> {
    let mut cur = t;
    for &i in position {
        match cur.args().get(i.wrapping_sub(1)) {
            Some(next) if i >= 1 => cur = next,
            _ => return Err(InvalidPosition { position: position.to_vec(), term: t.to_string() }),
        }
    }
    if position.is_empty() {
        return Err(InvalidPosition { position: Vec::new(), term: t.to_string() });
    }
    Ok(cur)
}

/// Every valid non-empty position of `t`, in pre-order.
pub fn positions(t: &Term) -> Vec<Position> {
    fn walk(t: &Term, prefix: &mut Position, out: &mut Vec<Position>) {
        for (i, a) in t.args().iter().enumerate() {
            prefix.push(i + 1);
            out.push(prefix.clone());
            walk(a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    walk(t, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
}

const TAG_A: &str = "\u{1}a";
const TAG_B: &str = "\u{1}b";

fn tag(t: &Term, side: Side) -> Term {
    match t {
        Term::Var(v) => {
            let prefix = if side == Side::A { TAG_A } else { TAG_B };
            Term::Var(Var {
                id: VarId { name: Arc::from(format!("{prefix}{}", v.id.name)), gen: v.id.gen },
                label: v.label,
            })
        }
        Term::Int(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| tag(a, side)).collect()),
    }
}

fn side_of(v: &VarId) -> Side {
    if v.name.starts_with(TAG_A) {
        Side::A
    } else {
        Side::B
    }
}

/// Unify renamed-apart copies of `a` and `b`, orienting variable pairs so
/// that the bindings have the best chance of meeting the side conditions.
fn mgu_apart(a: &Term, b: &Term) -> Option<(Subst, std::collections::HashMap<VarId, Var>)> {
    let (a1, b1) = (tag(a, Side::A), tag(b, Side::B));
    let vars: std::collections::HashMap<VarId, Var> =
        a1.vars().into_iter().chain(b1.vars()).map(|v| (v.id.clone(), v)).collect();
    let choose = |x: &Var, y: &Var| match (side_of(&x.id), side_of(&y.id)) {
        (Side::A, Side::B) | (Side::B, Side::A) => {
            let (av, bv, b_is_left) = if side_of(&x.id) == Side::A { (x, y, false) } else { (y, x, true) };
            let bind_b = bv.is_input() || av.is_input();
            match (bind_b, b_is_left) {
                (true, true) | (false, false) => Orient::BindLeft,
                _ => Orient::BindRight,
            }
        }
        (Side::B, Side::B) => match (x.is_input(), y.is_input()) {
            (true, _) => Orient::BindLeft,
            (false, true) => Orient::BindRight,
            (false, false) => Orient::Fail,
        },
        (Side::A, Side::A) => {
            if !x.is_input() {
                Orient::BindLeft
            } else {
                Orient::BindRight
            }
        }
    };
    let s = unify_by(&a1, &b1, choose, |_, _| true)?;
    Some((s, vars))
}

fn has_input_var(t: &Term) -> bool {
    t.vars().iter().any(Var::is_input)
}

/// A binding of a later-atom variable must not mention the later atom's free
/// variables: grounding the input would otherwise force them to a value.
fn has_free_b_var(t: &Term) -> bool {
    t.vars().iter().any(|v| side_of(&v.id) == Side::B && !v.is_input())
}

/// Sufficient check that every instance of `a` is more general than some instance of `b`.
pub fn is_moded_more_general(a: &Term, b: &Term) -> bool {
    let Some((mgu, vars)) = mgu_apart(a, b) else { return false };
    mgu.iter().all(|(v, t)| {
        let var = &vars[v];
        match side_of(v) {
            Side::B => var.is_input() && !has_free_b_var(t),
            Side::A => !var.is_input() && !has_input_var(t),
        }
    })
}

/// For every integer expression of `b` at some position, `a` has an integer
/// expression at the same position.
pub fn is_integer_similar(a: &Term, b: &Term) -> bool {
    positions(b).iter().all(|p| {
        let tb = subterm(p, b).expect("position enumerated from b");
        !tb.is_integer_expression() || subterm(p, a).is_ok_and(Term::is_integer_expression)
    })
}

/// The strengthened check implying both relations above.
pub fn check_pair(a: &Term, b: &Term) -> bool {
    let Some((mgu, vars)) = mgu_apart(a, b) else { return false };
    mgu.iter().all(|(v, t)| {
        let var = &vars[v];
        match side_of(v) {
            Side::B if has_free_b_var(t) => false,
            Side::B if var.is_integer() => t.is_integer_expression(),
            Side::B => var.is_input(),
            Side::A => !var.is_input() && !has_input_var(t) && !t.contains_int(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(m: Term, n: Term, l: Term) -> Term {
        Term::app("count", vec![m, n, l])
    }

    fn plus1(t: Term) -> Term {
        Term::binary("+", t, Term::int(1))
    }

    #[test]
    fn subterm_projection() {
        let a = count(Term::int(0), Term::integer("N"), Term::var("L"));
        assert_eq!(subterm(&[1], &a), Ok(&Term::int(0)));
        let b = count(plus1(Term::integer("M")), Term::integer("N"), Term::var("L"));
        assert_eq!(subterm(&[1, 2], &b), Ok(&Term::int(1)));
        assert!(subterm(&[3], &Term::app("f", vec![Term::atom("a")])).is_err());
        assert!(subterm(&[0], &a).is_err());
    }

    #[test]
    fn moded_more_general_examples() {
        let a = Term::app("eq_plus", vec![Term::input("I"), Term::input("I"), Term::int(0)]);
        assert!(is_moded_more_general(&a, &a));
        let px = Term::app("p", vec![Term::var("X")]);
        let pfy_in = Term::app("p", vec![Term::app("f", vec![Term::input("Y")])]);
        let pfy = Term::app("p", vec![Term::app("f", vec![Term::var("Y")])]);
        assert!(!is_moded_more_general(&px, &pfy_in));
        assert!(is_moded_more_general(&px, &pfy));
        // the later input would have to equal the later free variable
        let pxx = Term::app("p", vec![Term::var("X"), Term::var("X")]);
        let pyx = Term::app("p", vec![Term::input("Y"), Term::var("X")]);
        assert!(!is_moded_more_general(&pxx, &pyx));
        assert!(!check_pair(&pxx, &pyx));
    }

    #[test]
    fn integer_similarity_examples() {
        let (m, n, l) = (Term::integer("M"), Term::integer("N"), Term::var("L"));
        let c0 = count(Term::int(0), n.clone(), l.clone());
        let cm = count(m.clone(), n.clone(), l.clone());
        let cm1 = count(plus1(m.clone()), n.clone(), l.clone());
        assert!(is_integer_similar(&c0, &cm));
        assert!(is_integer_similar(&cm, &c0));
        assert!(is_integer_similar(&cm1, &cm));
        assert!(!is_integer_similar(&cm, &cm1));
    }

    #[test]
    fn check_pair_examples() {
        let a = count(Term::integer("M2"), Term::integer("N"), Term::var("L2"));
        let b = count(Term::integer("M1"), Term::integer("N"), Term::var("L1"));
        assert!(check_pair(&a, &b));
        let f = count(Term::app("f", vec![Term::var("X")]), Term::integer("N"), Term::var("L"));
        let z = count(Term::int(0), Term::integer("N"), Term::var("L"));
        assert!(!check_pair(&f, &z));
        let pxc = Term::app("p", vec![Term::var("X"), Term::atom("c")]);
        let pcy = Term::app("p", vec![Term::atom("c"), Term::input("Y")]);
        assert!(check_pair(&pxc, &pcy));
        // an integer constant flowing into a free variable of the later atom
        let later = Term::app("p", vec![Term::var("X")]);
        assert!(!check_pair(&later, &Term::app("p", vec![Term::int(3)])));
        assert!(is_moded_more_general(&later, &Term::app("p", vec![Term::int(3)])));
    }

    #[test]
    fn start_of_loop_is_not_general_enough() {
        let a = count(Term::integer("M1"), Term::integer("N"), Term::var("L1"));
        let b = count(Term::int(0), Term::integer("N"), Term::var("L"));
        assert!(!check_pair(&a, &b));
    }
}
