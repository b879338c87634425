//! The "expanded variant" relation driving the loop check.
//!
//! `current` is an expanded variant of `earlier` when both have the same
//! predicate and `earlier` can be laid over `current` with a bijective,
//! label-preserving variable renaming, where any mismatching subterm of
//! `earlier` may instead match a proper subterm of `current` (the argument
//! grew between the two calls).

use std::collections::HashMap;

use crate::syntax::{Term, VarId};

#[derive(Clone, Default)]
struct Renaming {
    fwd: HashMap<VarId, VarId>,
    back: HashMap<VarId, VarId>,
}

impl Renaming {
    fn bind(&mut self, a: &VarId, c: &VarId) -> bool {
        match (self.fwd.get(a), self.back.get(c)) {
            (Some(x), Some(y)) => x == c && y == a,
            (None, None) => {
                self.fwd.insert(a.clone(), c.clone());
                self.back.insert(c.clone(), a.clone());
                true
            }
            _ => false,
        }
    }
}

fn exact(earlier: &Term, current: &Term, r: &mut Renaming) -> bool {
    match (earlier, current) {
        (Term::Var(a), Term::Var(c)) => a.label == c.label && r.bind(&a.id, &c.id),
        (Term::Int(i), Term::Int(j)) => i == j,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| grown(x, y, r))
        }
        _ => false,
    }
}

/// `earlier` matches `current` exactly or matches one of its proper subterms.
fn grown(earlier: &Term, current: &Term, r: &mut Renaming) -> bool {
    let mut attempt = r.clone();
    if exact(earlier, current, &mut attempt) {
        *r = attempt;
        return true;
    }
    for sub in current.args() {
        let mut attempt = r.clone();
        if grown(earlier, sub, &mut attempt) {
            *r = attempt;
            return true;
        }
    }
    false
}

pub fn is_expanded_variant(current: &Term, earlier: &Term) -> bool {
    match (earlier, current) {
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            let mut r = Renaming::default();
            xs.iter().zip(ys).all(|(x, y)| grown(x, y, &mut r))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    fn count(m: Term, n: Term, l: Term) -> Term {
        Term::app("count", vec![m, n, l])
    }

    #[test]
    fn variants_are_expanded_variants() {
        let a = count(Term::integer("M1"), Term::integer("N"), Term::var("L1"));
        let b = count(Term::integer("M2"), Term::integer("N"), Term::var("L2"));
        assert!(is_expanded_variant(&b, &a));
    }

    #[test]
    fn constants_do_not_grow_into_variables() {
        let a = count(Term::int(0), Term::integer("N"), Term::var("L"));
        let b = count(Term::integer("M1"), Term::integer("N"), Term::var("L1"));
        assert!(!is_expanded_variant(&b, &a));
    }

    #[test]
    fn renaming_must_be_bijective() {
        let a = Term::app("eq_plus", vec![Term::input("I"), Term::input("J"), Term::input("P")]);
        let b = Term::app("eq_plus", vec![Term::input("I"), Term::input("I"), Term::int(0)]);
        assert!(!is_expanded_variant(&b, &a));
        assert!(is_expanded_variant(&b, &b));
    }

    #[test]
    fn labels_must_agree() {
        let a = Term::app("p", vec![Term::input("X")]);
        let b = Term::app("p", vec![Term::var("X")]);
        assert!(!is_expanded_variant(&b, &a));
    }

    #[test]
    fn growth_inside_arguments() {
        let a = Term::app("p", vec![Term::var("X")]);
        let b = Term::app("p", vec![Term::app("s", vec![Term::var("Y")])]);
        assert!(is_expanded_variant(&b, &a));
        assert!(!is_expanded_variant(&a, &b));
    }
}
