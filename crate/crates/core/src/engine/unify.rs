//! Syntactic unification with occurs check, plain and label-aware.

use std::collections::HashMap;

use crate::syntax::{Label, Subst, Term, Var, VarId};

/// Which side of a variable-variable equation gets bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orient {
    BindLeft,
    BindRight,
    Fail,
}

/// Add `v -> t` to an idempotent substitution (`t` must already be fully applied).
fn extend(subst: &mut Subst, v: &VarId, t: Term) {
    let single: Subst = std::iter::once((v.clone(), t.clone())).collect();
    for val in subst.values_mut() {
        if val.occurs(v) {
            *val = val.apply(&single);
        }
    }
    subst.insert(v.clone(), t);
}

/// Most general unifier with occurs check. `choose` decides which variable
/// is bound when two distinct variables meet; `on_bind` observes each
/// binding as it is made and may veto it by returning `false`.
pub fn unify_by(
    a: &Term,
    b: &Term,
    mut choose: impl FnMut(&Var, &Var) -> Orient,
    mut on_bind: impl FnMut(&Var, &Term) -> bool,
) -> Option<Subst> {
    let mut subst = Subst::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((s, t)) = stack.pop() {
        let s = s.apply(&subst);
        let t = t.apply(&subst);
        match (&s, &t) {
            (Term::Var(x), Term::Var(y)) if x.id == y.id => {}
            (Term::Var(x), Term::Var(y)) => {
                let (v, val) = match choose(x, y) {
                    Orient::BindLeft => (x, &t),
                    Orient::BindRight => (y, &s),
                    Orient::Fail => return None,
                };
                if !on_bind(v, val) {
                    return None;
                }
                extend(&mut subst, &v.id, val.clone());
            }
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.occurs(&x.id) || !on_bind(x, other) {
                    return None;
                }
                extend(&mut subst, &x.id, other.clone());
            }
            (Term::Int(i), Term::Int(j)) => {
                if i != j {
                    return None;
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
            }
            _ => return None,
        }
    }
    Some(subst)
}

/// Plain most general unifier; variable-variable equations bind the left side.
pub fn unify(a: &Term, b: &Term) -> Option<Subst> {
    unify_by(a, b, |_, _| Orient::BindLeft, |_, _| true)
}

/// Result of unifying a selected goal atom with a renamed clause head.
#[derive(Clone, Debug, PartialEq)]
pub struct ModedMgu {
    /// Idempotent mgu; bound terms carry the final labels.
    pub mgu: Subst,
    /// Bindings of variables that were input-labelled when bound, in binding order.
    pub input_bindings: Vec<(Var, Term)>,
    /// Final label of every variable that gained a label.
    pub labels: HashMap<VarId, Label>,
}

impl ModedMgu {
    /// Apply the mgu and the label propagation to a term.
    pub fn apply(&self, t: &Term) -> Term {
        t.apply(&self.mgu).relabel(&self.labels)
    }
}

/// Unify a goal atom `a` with a clause head `b` (renamed apart), propagating labels.
///
/// A free variable is bound in preference to a labelled one; between two
/// free variables the clause-side one is bound; between two input variables a
/// non-integer one is bound to an integer one, otherwise the goal-side one.
/// Binding an input variable to `t` makes every variable of `t` input, and
/// binding an integer variable to a variable makes that variable integer.
pub fn moded_unify(a: &Term, b: &Term) -> Option<ModedMgu> {
    let mut labels: HashMap<VarId, Label> = HashMap::new();
    for v in a.vars().into_iter().chain(b.vars()) {
        let e = labels.entry(v.id).or_insert(Label::Free);
        *e = e.join(v.label);
    }
    let cell = std::cell::RefCell::new((labels, Vec::<(Var, Term)>::new()));
    let label_of = |id: &VarId| cell.borrow().0.get(id).copied().unwrap_or(Label::Free);
    let mgu = unify_by(
        a,
        b,
        |x, y| {
            let (lx, ly) = (label_of(&x.id), label_of(&y.id));
            match (lx.is_input(), ly.is_input()) {
                (false, true) => Orient::BindLeft,
                (true, false) | (false, false) => Orient::BindRight,
                (true, true) if ly.is_integer() && !lx.is_integer() => Orient::BindLeft,
                (true, true) if lx.is_integer() && !ly.is_integer() => Orient::BindRight,
                (true, true) => Orient::BindLeft,
            }
        },
        |v, t| {
            let mut state = cell.borrow_mut();
            let lv = state.0.get(&v.id).copied().unwrap_or(Label::Free);
            if lv.is_input() {
                for u in t.vars() {
                    let e = state.0.entry(u.id).or_insert(Label::Free);
                    *e = e.join(Label::Input);
                }
                if let (true, Term::Var(u)) = (lv.is_integer(), t) {
                    state.0.insert(u.id.clone(), Label::Integer);
                }
                state.1.push((Var { id: v.id.clone(), label: lv }, t.clone()));
            }
            true
        },
    )?;
    let (labels, raw_bindings) = cell.into_inner();
    let labels: HashMap<VarId, Label> = labels.into_iter().filter(|(_, l)| *l != Label::Free).collect();
    let mgu: Subst = mgu.into_iter().map(|(k, t)| (k, t.relabel(&labels))).collect();
    // later bindings may have instantiated variables of earlier recorded terms
    let input_bindings = raw_bindings.into_iter().map(|(v, t)| (v, t.apply(&mgu).relabel(&labels))).collect();
    Some(ModedMgu { mgu, input_bindings, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn app(f: &str, args: Vec<Term>) -> Term {
        Term::app(f, args)
    }

    #[test]
    fn eq_binds_second_input_to_first() {
        let goal = app("eq", vec![Term::input("I"), Term::input("J")]);
        let head = app("eq", vec![Term::var("A"), Term::var("A")]);
        let m = moded_unify(&goal, &head).unwrap();
        assert_eq!(m.mgu.get(&VarId::new("A", 0)), Some(&Term::input("I")));
        assert_eq!(m.input_bindings, vec![(Var::new("J", Label::Input), Term::input("I"))]);
    }

    #[test]
    fn unlabelled_unification_records_nothing() {
        let m = moded_unify(&parse_term("p(X)").unwrap(), &parse_term("p(f(Y))").unwrap()).unwrap();
        assert_eq!(m.mgu.get(&VarId::new("X", 0)), Some(&parse_term("f(Y)").unwrap()));
        assert!(m.input_bindings.is_empty());
    }

    #[test]
    fn plus_zero_clause() {
        let goal = app("plus", vec![Term::input("P"), Term::input("I"), Term::var("In")]);
        let head = app("plus", vec![Term::int(0), Term::var("B"), Term::var("B")]);
        let m = moded_unify(&goal, &head).unwrap();
        assert_eq!(m.input_bindings, vec![(Var::new("P", Label::Input), Term::int(0))]);
        assert_eq!(m.apply(&Term::var("In")), Term::input("I"));
        assert_eq!(m.apply(&Term::var("B")), Term::input("I"));
    }

    #[test]
    fn input_binding_labels_the_bound_term() {
        let goal = app("p", vec![Term::input("P")]);
        let head = app("p", vec![app("s", vec![Term::var("A")])]);
        let m = moded_unify(&goal, &head).unwrap();
        assert_eq!(m.input_bindings, vec![(Var::new("P", Label::Input), app("s", vec![Term::input("A")]))]);
    }

    #[test]
    fn integer_label_flows_to_variables() {
        let goal = app("p", vec![Term::integer("N")]);
        let head = app("p", vec![Term::var("X")]);
        let m = moded_unify(&goal, &head).unwrap();
        assert_eq!(m.apply(&Term::var("X")), Term::integer("N"));
        assert!(m.input_bindings.is_empty());
        let goal = app("q", vec![Term::input("A"), Term::integer("N")]);
        let head = app("q", vec![Term::var("X"), Term::var("X")]);
        let m = moded_unify(&goal, &head).unwrap();
        assert_eq!(m.input_bindings, vec![(Var::new("A", Label::Input), Term::integer("N"))]);
    }

    #[test]
    fn occurs_check() {
        assert!(unify(&parse_term("X").unwrap(), &parse_term("f(X)").unwrap()).is_none());
        let goal = app("eq", vec![app("s", vec![Term::input("I")]), Term::input("I")]);
        let head = app("eq", vec![Term::var("A"), Term::var("A")]);
        assert!(moded_unify(&goal, &head).is_none());
    }

    #[test]
    fn plain_unifier_is_idempotent() {
        let s = unify(&parse_term("f(X, Y, Z)").unwrap(), &parse_term("f(Y, Z, g(W))").unwrap()).unwrap();
        for t in s.values() {
            assert_eq!(t.apply(&s), *t);
        }
        let lhs = parse_term("f(X, Y, Z)").unwrap().apply(&s);
        let rhs = parse_term("f(Y, Z, g(W))").unwrap().apply(&s);
        assert_eq!(lhs, rhs);
    }
}
