//! Symbolic integer expressions and conditions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;

use super::poly::Poly;
use crate::engine::NodeId;
use crate::syntax::{CmpOp, Term, VarId};

/// A symbol of the constraint language.
///
/// Variant order matters: monomials list symbols in this order, so template
/// coefficients come last and circuits can share products of the others.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    /// An integer variable of the moded tree.
    Var(VarId),
    /// Unknown integer of the query, one per integer argument.
    Query(String),
    /// Lower/upper limit of the domain of a loop integer.
    Lower(String),
    /// Direction of the domain of a loop integer: -1, 0 or 1.
    Dir(String),
    /// Universally quantified natural replacing a loop integer.
    Nat(String),
    /// Coefficient of a premise template; always a natural number.
    Template(String),
}

impl Sym {
    /// Symbols that remain in a diophantine system (everything except tree variables and naturals).
    pub fn is_unknown(&self) -> bool {
        !matches!(self, Sym::Var(_) | Sym::Nat(_))
    }

    /// Unambiguous text form, inverse of [`Sym::from_key`].
    pub fn key(&self) -> String {
        match self {
            Sym::Var(v) => format!("var:{}/{}", v.name, v.gen),
            Sym::Query(s) => format!("query:{s}"),
            Sym::Lower(s) => format!("lower:{s}"),
            Sym::Dir(s) => format!("dir:{s}"),
            Sym::Nat(s) => format!("nat:{s}"),
            Sym::Template(s) => format!("template:{s}"),
        }
    }

    pub fn from_key(key: &str) -> Option<Sym> {
        let (tag, rest) = key.split_once(':')?;
        let s = rest.to_string();
        Some(match tag {
            "var" => {
                let (name, gen) = rest.rsplit_once('/')?;
                Sym::Var(VarId::new(name, gen.parse().ok()?))
            }
            "query" => Sym::Query(s),
            "lower" => Sym::Lower(s),
            "dir" => Sym::Dir(s),
            "nat" => Sym::Nat(s),
            "template" => Sym::Template(s),
            _ => return None,
        })
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Var(v) => write!(f, "{v}"),
            Sym::Query(s) => f.write_str(s),
            Sym::Lower(s) => write!(f, "c_{s}"),
            Sym::Dir(s) => write!(f, "d_{s}"),
            Sym::Nat(s) => write!(f, "nat_{s}"),
            Sym::Template(s) => f.write_str(s),
        }
    }
}

/// An integer expression over constants and symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Const(BigInt),
    Sym(Sym),
    Neg(Box<IntExpr>),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn int(v: i64) -> Self {
        IntExpr::Const(BigInt::from(v))
    }

    pub fn sym(s: Sym) -> Self {
        IntExpr::Sym(s)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: IntExpr, b: IntExpr) -> Self {
        IntExpr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: IntExpr, b: IntExpr) -> Self {
        IntExpr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: IntExpr, b: IntExpr) -> Self {
        IntExpr::Mul(Box::new(a), Box::new(b))
    }

    /// Read an integer expression term; variables become [`Sym::Var`] whatever their label.
    pub fn from_term(t: &Term) -> Option<IntExpr> {
        Some(match t {
            Term::Int(i) => IntExpr::Const(i.clone()),
            Term::Var(v) => IntExpr::Sym(Sym::Var(v.id.clone())),
            Term::App(op, args) => match (&**op, args.as_slice()) {
                ("-", [a]) => IntExpr::Neg(Box::new(Self::from_term(a)?)),
                ("+", [a, b]) => IntExpr::add(Self::from_term(a)?, Self::from_term(b)?),
                ("-", [a, b]) => IntExpr::sub(Self::from_term(a)?, Self::from_term(b)?),
                ("*", [a, b]) => IntExpr::mul(Self::from_term(a)?, Self::from_term(b)?),
                _ => return None,
            },
        })
    }

    /// Render as a term, naming every symbol by its display text.
    pub fn to_term(&self) -> Term {
        match self {
            IntExpr::Const(c) => Term::Int(c.clone()),
            IntExpr::Sym(s) => Term::var(&s.to_string()),
            IntExpr::Neg(a) => Term::app("-", vec![a.to_term()]),
            IntExpr::Add(a, b) => Term::binary("+", a.to_term(), b.to_term()),
            IntExpr::Sub(a, b) => Term::binary("-", a.to_term(), b.to_term()),
            IntExpr::Mul(a, b) => Term::binary("*", a.to_term(), b.to_term()),
        }
    }

    pub fn to_poly(&self) -> Poly<BigInt> {
        match self {
            IntExpr::Const(c) => Poly::constant(c.clone()),
            IntExpr::Sym(s) => Poly::var(s.clone()),
            IntExpr::Neg(a) => a.to_poly().neg(),
            IntExpr::Add(a, b) => a.to_poly().add(&b.to_poly()),
            IntExpr::Sub(a, b) => a.to_poly().sub(&b.to_poly()),
            IntExpr::Mul(a, b) => a.to_poly().mul(&b.to_poly()),
        }
    }

    pub fn syms(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_syms(&mut out);
        out
    }

    fn collect_syms(&self, out: &mut BTreeSet<Sym>) {
        match self {
            IntExpr::Const(_) => {}
            IntExpr::Sym(s) => {
                out.insert(s.clone());
            }
            IntExpr::Neg(a) => a.collect_syms(out),
            IntExpr::Add(a, b) | IntExpr::Sub(a, b) | IntExpr::Mul(a, b) => {
                a.collect_syms(out);
                b.collect_syms(out);
            }
        }
    }

    /// Simultaneous substitution of symbols.
    pub fn substitute(&self, map: &HashMap<Sym, IntExpr>) -> IntExpr {
        match self {
            IntExpr::Const(_) => self.clone(),
            IntExpr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            IntExpr::Neg(a) => IntExpr::Neg(Box::new(a.substitute(map))),
            IntExpr::Add(a, b) => IntExpr::add(a.substitute(map), b.substitute(map)),
            IntExpr::Sub(a, b) => IntExpr::sub(a.substitute(map), b.substitute(map)),
            IntExpr::Mul(a, b) => IntExpr::mul(a.substitute(map), b.substitute(map)),
        }
    }

    /// Substitute repeatedly until no mapped symbol remains. The map must be acyclic.
    pub fn substitute_fixpoint(&self, map: &HashMap<Sym, IntExpr>) -> IntExpr {
        let mut cur = self.clone();
        while cur.syms().iter().any(|s| map.contains_key(s)) {
            cur = cur.substitute(map);
        }
        cur
    }

    pub fn eval(&self, values: &HashMap<Sym, BigInt>) -> Option<BigInt> {
        Some(match self {
            IntExpr::Const(c) => c.clone(),
            IntExpr::Sym(s) => values.get(s)?.clone(),
            IntExpr::Neg(a) => -a.eval(values)?,
            IntExpr::Add(a, b) => a.eval(values)? + b.eval(values)?,
            IntExpr::Sub(a, b) => a.eval(values)? - b.eval(values)?,
            IntExpr::Mul(a, b) => a.eval(values)? * b.eval(values)?,
        })
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// `lhs op rhs`, remembering the tree node whose condition it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntCondition {
    pub lhs: IntExpr,
    pub op: CmpOp,
    pub rhs: IntExpr,
    pub origin: Option<NodeId>,
}

impl IntCondition {
    pub fn new(lhs: IntExpr, op: CmpOp, rhs: IntExpr) -> Self {
        IntCondition { lhs, op, rhs, origin: None }
    }

    pub fn with_origin(mut self, origin: Option<NodeId>) -> Self {
        self.origin = origin;
        self
    }

    /// Read a comparison atom.
    pub fn from_term(t: &Term) -> Option<IntCondition> {
        let (name, args) = match t {
            Term::App(n, a) if a.len() == 2 => (n, a),
            _ => return None,
        };
        let op = CmpOp::from_name(name)?;
        Some(IntCondition::new(IntExpr::from_term(&args[0])?, op, IntExpr::from_term(&args[1])?))
    }

    pub fn map(&self, f: impl Fn(&IntExpr) -> IntExpr) -> IntCondition {
        IntCondition { lhs: f(&self.lhs), op: self.op, rhs: f(&self.rhs), origin: self.origin }
    }

    pub fn syms(&self) -> BTreeSet<Sym> {
        let mut s = self.lhs.syms();
        s.extend(self.rhs.syms());
        s
    }

    pub fn eval(&self, values: &HashMap<Sym, BigInt>) -> Option<bool> {
        Some(self.op.holds(&self.lhs.eval(values)?, &self.rhs.eval(values)?))
    }
}

impl fmt::Display for IntCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn reads_conditions() {
        let c = IntCondition::from_term(&parse_term("M1 + 1 > N").unwrap()).unwrap();
        assert_eq!(c.op, CmpOp::Gt);
        assert_eq!(c.to_string(), "M1 + 1 > N");
        assert!(IntCondition::from_term(&parse_term("f(X) > 1").unwrap()).is_none());
    }

    #[test]
    fn symbol_keys_round_trip() {
        for s in [
            Sym::Var(VarId::new("M1", 3)),
            Sym::Query("n".into()),
            Sym::Lower("M".into()),
            Sym::Dir("M".into()),
            Sym::Nat("M".into()),
            Sym::Template("a0_1".into()),
        ] {
            assert_eq!(Sym::from_key(&s.key()), Some(s));
        }
        assert_eq!(Sym::from_key("bogus"), None);
    }

    #[test]
    fn fixpoint_substitution() {
        let a = Sym::Var(VarId::new("A", 0));
        let b = Sym::Var(VarId::new("B", 0));
        let map: HashMap<Sym, IntExpr> =
            [(a.clone(), IntExpr::add(IntExpr::sym(b.clone()), IntExpr::int(1))), (b.clone(), IntExpr::int(0))].into();
        let e = IntExpr::sym(a).substitute_fixpoint(&map);
        assert_eq!(e.to_string(), "0 + 1");
        assert_eq!(e.eval(&HashMap::new()), Some(BigInt::from(1)));
    }
}
