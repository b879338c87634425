use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Mode label carried by a variable.
///
/// `Integer` implies input: an integer variable denotes an unknown integer,
/// which is in particular an unknown ground term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Free,
    Input,
    Integer,
}

impl Label {
    pub fn is_input(self) -> bool {
        !matches!(self, Label::Free)
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Label::Integer)
    }

    /// Least upper bound; labels only ever get stronger.
    pub fn join(self, other: Label) -> Label {
        self.max(other)
    }
}

/// Identity of a variable: its source name plus a renaming generation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub name: Arc<str>,
    pub gen: u32,
}

impl VarId {
    pub fn new(name: &str, gen: u32) -> Self {
        VarId { name: Arc::from(name), gen }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen == 0 {
            f.write_str(&self.name)
        } else {
            write!(f, "{}_{}", self.name, self.gen)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub id: VarId,
    pub label: Label,
}

impl Var {
    pub fn new(name: &str, label: Label) -> Self {
        Var { id: VarId::new(name, 0), label }
    }

    pub fn is_input(&self) -> bool {
        self.label.is_input()
    }

    pub fn is_integer(&self) -> bool {
        self.label.is_integer()
    }
}

/// A first-order term. Atoms are `App` at predicate position, constants are
/// 0-ary `App`s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Int(BigInt),
    App(Arc<str>, Vec<Term>),
}

/// Idempotent substitution, kept in binding order.
pub type Subst = IndexMap<VarId, Term>;

/// Binary integer operators allowed in integer expressions.
pub const ARITH_BINARY: [&str; 3] = ["+", "-", "*"];

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name, Label::Free))
    }

    pub fn input(name: &str) -> Term {
        Term::Var(Var::new(name, Label::Input))
    }

    pub fn integer(name: &str) -> Term {
        Term::Var(Var::new(name, Label::Integer))
    }

    pub fn int(value: i64) -> Term {
        Term::Int(BigInt::from(value))
    }

    pub fn atom(name: &str) -> Term {
        Term::App(Arc::from(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::from(name), args)
    }

    pub fn binary(op: &str, lhs: Term, rhs: Term) -> Term {
        Term::app(op, vec![lhs, rhs])
    }

    pub fn nil() -> Term {
        Term::atom("[]")
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::app(".", vec![head, tail])
    }

    /// Predicate or functor key `(name, arity)`; `None` for variables and integers.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::App(name, args) => Some((name, args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Built from integer constants, integer-labelled variables, unary minus,
    /// `+`, `-` and `*`.
    pub fn is_integer_expression(&self) -> bool {
        match self {
            Term::Int(_) => true,
            Term::Var(v) => v.is_integer(),
            Term::App(op, args) => match args.len() {
                1 => &**op == "-" && args[0].is_integer_expression(),
                2 => {
                    ARITH_BINARY.contains(&&**op) && args[0].is_integer_expression() && args[1].is_integer_expression()
                }
                _ => false,
            },
        }
    }

    pub fn contains_int(&self) -> bool {
        match self {
            Term::Int(_) => true,
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().any(Term::contains_int),
        }
    }

    /// Distinct variables in left-to-right order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        self.collect_vars(&mut out, &mut seen);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>, seen: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v) => {
                if seen.insert(v.id.clone()) {
                    out.push(v.clone());
                }
            }
            Term::Int(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out, seen)),
        }
    }

    pub fn occurs(&self, id: &VarId) -> bool {
        match self {
            Term::Var(v) => &v.id == id,
            Term::Int(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.occurs(id)),
        }
    }

    /// Apply an idempotent substitution.
    pub fn apply(&self, subst: &Subst) -> Term {
        if subst.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => subst.get(&v.id).cloned().unwrap_or_else(|| self.clone()),
            Term::Int(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(subst)).collect()),
        }
    }

    /// Strengthen labels of the listed variables.
    pub fn relabel(&self, labels: &HashMap<VarId, Label>) -> Term {
        if labels.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => match labels.get(&v.id) {
                Some(&l) => Term::Var(Var { id: v.id.clone(), label: v.label.join(l) }),
                None => self.clone(),
            },
            Term::Int(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.relabel(labels)).collect()),
        }
    }

    /// Rename every variable to generation `gen`, keeping labels.
    pub fn with_generation(&self, gen: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var { id: VarId { name: v.id.name.clone(), gen }, label: v.label }),
            Term::Int(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.with_generation(gen)).collect()),
        }
    }

    /// Drop every label (used to build concrete queries).
    pub fn unlabelled(&self) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var { id: v.id.clone(), label: Label::Free }),
            Term::Int(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(Term::unlabelled).collect()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) if !args.is_empty() => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Every subterm (including `self`) in pre-order.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            out.extend(out[i].args());
            i += 1;
        }
        out
    }

    /// Labelled rendering: `I:in`, `N:int` for input and integer variables.
    pub fn moded(&self) -> String {
        crate::syntax::print::moded_string(self)
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl Clause {
    pub fn vars(&self) -> Vec<Var> {
        let whole = Term::App(
            Arc::from("$clause"),
            std::iter::once(self.head.clone()).chain(self.body.iter().cloned()).collect(),
        );
        whole.vars()
    }

    pub fn renamed(&self, gen: u32) -> Clause {
        Clause {
            head: self.head.with_generation(gen),
            body: self.body.iter().map(|b| b.with_generation(gen)).collect(),
        }
    }
}

/// Ordered clause list with a predicate index.
#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    index: HashMap<(Arc<str>, usize), Vec<usize>>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Self {
        let mut index: HashMap<(Arc<str>, usize), Vec<usize>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            if let Term::App(name, args) = &c.head {
                index.entry((name.clone(), args.len())).or_default().push(i);
            }
        }
        Program { clauses, index }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, idx: usize) -> &Clause {
        &self.clauses[idx]
    }

    /// Indices of the clauses defining `name/arity`, in source order.
    pub fn clauses_for(&self, name: &str, arity: usize) -> &[usize] {
        self.index.get(&(Arc::from(name), arity)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn defines(&self, name: &str, arity: usize) -> bool {
        !self.clauses_for(name, arity).is_empty()
    }

    pub fn arities_of(&self, name: &str) -> Vec<usize> {
        let mut out: Vec<usize> = self.index.keys().filter(|(n, _)| &**n == name).map(|&(_, a)| a).collect();
        out.sort_unstable();
        out
    }
}

/// A single-atom moded query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModedQuery {
    pub atom: Term,
    pub source_text: String,
}

impl ModedQuery {
    pub fn integer_vars(&self) -> Vec<Var> {
        self.atom.vars().into_iter().filter(Var::is_integer).collect()
    }

    pub fn input_vars(&self) -> Vec<Var> {
        self.atom.vars().into_iter().filter(Var::is_input).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus(a: Term, b: Term) -> Term {
        Term::binary("+", a, b)
    }

    #[test]
    fn integer_expressions() {
        assert!(plus(Term::int(0), Term::int(1)).is_integer_expression());
        assert!(plus(Term::integer("M"), Term::int(1)).is_integer_expression());
        assert!(!plus(Term::input("M"), Term::int(1)).is_integer_expression());
        let list = Term::cons(Term::integer("M"), Term::var("L"));
        assert!(!list.is_integer_expression());
        assert!(Term::app("-", vec![Term::int(3)]).is_integer_expression());
        assert!(!Term::app("+", vec![Term::int(3)]).is_integer_expression());
        assert!(!Term::binary("/", Term::int(3), Term::int(1)).is_integer_expression());
    }

    #[test]
    fn vars_in_order() {
        let t = Term::app("f", vec![Term::var("Y"), Term::app("g", vec![Term::var("X"), Term::var("Y")])]);
        let names: Vec<_> = t.vars().into_iter().map(|v| v.id.to_string()).collect();
        assert_eq!(names, ["Y", "X"]);
    }

    #[test]
    fn labels_join_upwards() {
        assert_eq!(Label::Free.join(Label::Input), Label::Input);
        assert_eq!(Label::Integer.join(Label::Input), Label::Integer);
        assert!(Label::Integer.is_input());
    }

    #[test]
    fn program_index_keeps_order() {
        let c = |h: Term| Clause { head: h, body: vec![] };
        let p = Program::new(vec![
            c(Term::app("p", vec![Term::int(1)])),
            c(Term::atom("q")),
            c(Term::app("p", vec![Term::int(2)])),
        ]);
        assert_eq!(p.clauses_for("p", 1), &[0, 2]);
        assert!(p.clauses_for("p", 2).is_empty());
        assert_eq!(p.arities_of("q"), vec![0]);
    }
}
