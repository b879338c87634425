//! Normal form, polynomial interpretation of implications, and the final
//! quantifier-free system.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::expr::{IntCondition, Sym};
use super::generate::SymbolicSystem;
use super::poly::Poly;
use crate::engine::NodeId;
use crate::syntax::CmpOp;
use crate::IntPoly;

/// Premise template family for the polynomial interpretation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PremTemplate {
    /// Weighted sum of the premise sides.
    #[default]
    Linear,
    /// Weighted sum plus every pairwise product.
    Max2,
}

impl fmt::Display for PremTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PremTemplate::Linear => "linear",
            PremTemplate::Max2 => "max2",
        })
    }
}

impl std::str::FromStr for PremTemplate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(PremTemplate::Linear),
            "max2" => Ok(PremTemplate::Max2),
            other => Err(format!("unknown premise template `{other}` (expected linear or max2)")),
        }
    }
}

/// `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct GePair {
    pub lhs: IntPoly,
    pub rhs: IntPoly,
}

impl GePair {
    pub fn diff(&self) -> IntPoly {
        self.lhs.sub(&self.rhs)
    }
}

/// Premises implying a single conclusion, all in `>=` form.
#[derive(Clone, Debug, PartialEq)]
pub struct GeImplication {
    pub premises: Vec<GePair>,
    pub conclusion: GePair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// `poly >= 0`
    Ge,
    /// `poly = 0`
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DioConstraint {
    pub poly: IntPoly,
    pub kind: ConstraintKind,
    /// Where the constraint came from, for dumps.
    pub origin: String,
}

impl DioConstraint {
    pub fn holds(&self, values: &HashMap<Sym, BigInt>) -> Option<bool> {
        let v = self.poly.eval(values)?;
        Some(match self.kind {
            ConstraintKind::Ge => v >= BigInt::from(0),
            ConstraintKind::Eq => v == BigInt::from(0),
        })
    }
}

/// A conjunction of polynomial constraints over the unknown symbols only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiophantineSystem {
    /// Every unknown, including ones that no constraint mentions.
    pub symbols: BTreeSet<Sym>,
    pub constraints: Vec<DioConstraint>,
}

impl DiophantineSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, poly: IntPoly, kind: ConstraintKind, origin: impl Into<String>) {
        self.symbols.extend(poly.symbols());
        self.constraints.push(DioConstraint { poly, kind, origin: origin.into() });
    }

    pub fn push_ge(&mut self, poly: IntPoly, origin: impl Into<String>) {
        self.push(poly, ConstraintKind::Ge, origin);
    }

    pub fn push_eq(&mut self, poly: IntPoly, origin: impl Into<String>) {
        self.push(poly, ConstraintKind::Eq, origin);
    }

    pub fn extend(&mut self, other: DiophantineSystem) {
        self.symbols.extend(other.symbols);
        self.constraints.extend(other.constraints);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "symbols": self.symbols.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "constraints": self.constraints.iter().map(|c| json!({
                "kind": c.kind,
                "poly": c.poly.to_string_map(),
                "origin": c.origin,
            })).collect::<Vec<_>>(),
        })
    }
}

/// One way of resolving every `=\=` into `>` or `<`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalBranch {
    /// Chosen operator per originating condition node.
    pub choices: Vec<(Option<NodeId>, CmpOp)>,
    /// Reachability, linking and range constraints.
    pub side: DiophantineSystem,
    pub implications: Vec<GeImplication>,
    /// Universally quantified naturals.
    pub nat_vars: Vec<Sym>,
}

/// At most this many independent `=\=` splits (2^n branches).
pub const MAX_DISEQUALITY_SPLITS: usize = 8;

fn to_ge(c: &IntCondition, choice: &HashMap<Option<NodeId>, CmpOp>) -> Vec<GePair> {
    ge_form(c, choice.get(&c.origin).copied().unwrap_or(CmpOp::Gt))
}

/// The condition as a conjunction of `>=` pairs; a disequality becomes
/// `ne_as` (`>` or `<`).
pub fn ge_form(c: &IntCondition, ne_as: CmpOp) -> Vec<GePair> {
    let (l, r) = (c.lhs.to_poly(), c.rhs.to_poly());
    let one = Poly::int(1);
    let op = match c.op {
        CmpOp::Ne => ne_as,
        op => op,
    };
    match op {
        CmpOp::Ge => vec![GePair { lhs: l, rhs: r }],
        CmpOp::Gt => vec![GePair { lhs: l, rhs: r.add(&one) }],
        CmpOp::Le => vec![GePair { lhs: r, rhs: l }],
        CmpOp::Lt => vec![GePair { lhs: r, rhs: l.add(&one) }],
        CmpOp::Eq => vec![GePair { lhs: l.clone(), rhs: r.clone() }, GePair { lhs: r, rhs: l }],
        CmpOp::Ne => panic!("a disequality must be split into > or <"),
    }
}

fn side_constraint(
    sys: &mut DiophantineSystem,
    c: &IntCondition,
    choice: &HashMap<Option<NodeId>, CmpOp>,
    origin: &str,
) {
    if c.op == CmpOp::Eq {
        sys.push_eq(c.lhs.to_poly().sub(&c.rhs.to_poly()), format!("{origin}: {c}"));
    } else {
        for g in to_ge(c, choice) {
            sys.push_ge(g.diff(), format!("{origin}: {c}"));
        }
    }
}

/// Split disequalities and bring the (natural-form) system into `>=` form
/// with one implication per conclusion.
pub fn normalize(s: &SymbolicSystem) -> Result<Vec<NormalBranch>, String> {
    let all = s.reachability.iter().chain(&s.implication.premises).chain(&s.implication.conclusions);
    let mut origins: Vec<Option<NodeId>> = all.filter(|c| c.op == CmpOp::Ne).map(|c| c.origin).collect();
    origins.sort();
    origins.dedup();
    if origins.len() > MAX_DISEQUALITY_SPLITS {
        return Err(format!("{} disequalities exceed the split limit of {MAX_DISEQUALITY_SPLITS}", origins.len()));
    }
    let mut branches = Vec::new();
    for mask in 0..(1usize << origins.len()) {
        let choice: HashMap<Option<NodeId>, CmpOp> = origins
            .iter()
            .enumerate()
            .map(|(i, o)| (*o, if mask >> i & 1 == 0 { CmpOp::Gt } else { CmpOp::Lt }))
            .collect();
        let mut side = DiophantineSystem::new();
        for (_, sym) in &s.query_symbols {
            side.symbols.insert(sym.clone());
        }
        for lv in &s.loop_vars {
            side.symbols.insert(lv.lower());
            side.symbols.insert(lv.dir());
        }
        for c in &s.reachability {
            side_constraint(&mut side, c, &choice, "reachability");
        }
        for c in &s.linking {
            side_constraint(&mut side, c, &choice, "linking");
        }
        for c in &s.ranges {
            side_constraint(&mut side, c, &choice, "range");
        }
        let premises: Vec<GePair> = s.implication.premises.iter().flat_map(|c| to_ge(c, &choice)).collect();
        let implications = s
            .implication
            .conclusions
            .iter()
            .flat_map(|c| to_ge(c, &choice))
            .map(|conclusion| GeImplication { premises: premises.clone(), conclusion })
            .collect();
        branches.push(NormalBranch {
            choices: origins.iter().map(|o| (*o, choice[o])).collect(),
            side,
            implications,
            nat_vars: s.implication.vars.clone(),
        });
    }
    Ok(branches)
}

/// The conclusion difference minus a template over the premise differences
/// `x_i = p_i - q_i` with fresh natural coefficients named after `tag`:
/// `sum a_i*x_i` for linear, plus `sum b_ij*x_i*x_j` for max2. If the result
/// is nonnegative on all naturals, the implication holds. Returns the
/// polynomial and the template symbols.
pub fn eliminate_implication(imp: &GeImplication, template: PremTemplate, tag: &str) -> (IntPoly, Vec<Sym>) {
    let mut poly = imp.conclusion.diff();
    let mut coeffs = Vec::new();
    for (i, p) in imp.premises.iter().enumerate() {
        let a = Sym::Template(format!("a{tag}_{i}"));
        poly = poly.sub(&Poly::var(a.clone()).mul(&p.diff()));
        coeffs.push(a);
    }
    if template == PremTemplate::Max2 {
        for i in 0..imp.premises.len() {
            for j in i..imp.premises.len() {
                let b = Sym::Template(format!("b{tag}_{i}_{j}"));
                let (pi, pj) = (&imp.premises[i], &imp.premises[j]);
                // Products of the premise differences, which are natural
                // whenever the premises hold. Products of the sides would
                // not be monotone once a side can go negative.
                let prod = pi.diff().mul(&pj.diff());
                poly = poly.sub(&Poly::var(b.clone()).mul(&prod));
                coeffs.push(b);
            }
        }
    }
    (poly, coeffs)
}

/// One `coefficient >= 0` constraint per monomial over the naturals.
pub fn absolute_positiveness(p: &IntPoly, is_nat: impl Fn(&Sym) -> bool) -> DiophantineSystem {
    let mut sys = DiophantineSystem::new();
    let groups: BTreeMap<_, _> = p.collect_by(is_nat);
    for (m, coeff) in groups {
        sys.push_ge(coeff, format!("coefficient of {m}"));
    }
    sys
}

/// The complete conjunctive system for one branch.
pub fn diophantine_system(branch: &NormalBranch, template: PremTemplate) -> DiophantineSystem {
    let mut sys = branch.side.clone();
    let nats: BTreeSet<&Sym> = branch.nat_vars.iter().collect();
    for (k, imp) in branch.implications.iter().enumerate() {
        let (poly, coeffs) = eliminate_implication(imp, template, &k.to_string());
        for c in coeffs {
            sys.push_ge(Poly::var(c.clone()), format!("template {c} is natural"));
        }
        let mut pos = absolute_positiveness(&poly, |s| nats.contains(s));
        for c in &mut pos.constraints {
            c.origin = format!("implication {k}, {}", c.origin);
        }
        sys.extend(pos);
    }
    sys
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::expr::IntExpr;

    fn x() -> IntPoly {
        Poly::var(Sym::Nat("X".into()))
    }

    fn y() -> IntPoly {
        Poly::var(Sym::Nat("Y".into()))
    }

    #[test]
    fn linear_elimination_example() {
        let imp = GeImplication {
            premises: vec![GePair { lhs: x(), rhs: y() }],
            conclusion: GePair { lhs: x().add(&Poly::int(1)), rhs: y() },
        };
        let (p, coeffs) = eliminate_implication(&imp, PremTemplate::Linear, "0");
        let a = Poly::var(coeffs[0].clone());
        let expected = Poly::int(1).sub(&a).mul(&x()).add(&a.sub(&Poly::int(1)).mul(&y())).add(&Poly::int(1));
        assert_eq!(p, expected);
        let sys = absolute_positiveness(&p, |s| matches!(s, Sym::Nat(_)));
        let polys: Vec<_> = sys.constraints.iter().map(|c| c.poly.clone()).collect();
        assert_eq!(polys, vec![Poly::int(1), Poly::int(1).sub(&a), a.sub(&Poly::int(1))]);
    }

    #[test]
    fn max2_multiplies_premise_differences() {
        // X >= 5 does not give X - 1 >= 5, whatever the weights. Products
        // of the premise sides would accept b = 1: X*X - 25 under X - 6.
        let imp = GeImplication {
            premises: vec![GePair { lhs: x(), rhs: Poly::int(5) }],
            conclusion: GePair { lhs: x().sub(&Poly::int(1)), rhs: Poly::int(5) },
        };
        let (p, coeffs) = eliminate_implication(&imp, PremTemplate::Max2, "0");
        let (a, b) = (Poly::var(coeffs[0].clone()), Poly::var(coeffs[1].clone()));
        let d = x().sub(&Poly::int(5));
        let expected = x().sub(&Poly::int(6)).sub(&a.mul(&d)).sub(&b.mul(&d).mul(&d));
        assert_eq!(p, expected);
    }

    #[test]
    fn no_premises_leaves_the_conclusion() {
        let imp = GeImplication { premises: vec![], conclusion: GePair { lhs: x(), rhs: Poly::int(2) } };
        let (p, coeffs) = eliminate_implication(&imp, PremTemplate::Max2, "0");
        assert!(coeffs.is_empty());
        assert_eq!(p, x().sub(&Poly::int(2)));
    }

    #[test]
    fn constant_polynomial() {
        let sys = absolute_positiveness(&Poly::int(5), |_| true);
        assert_eq!(sys.constraints.len(), 1);
        assert_eq!(sys.constraints[0].poly, Poly::int(5));
    }

    #[test]
    fn strict_and_equal_conditions() {
        let c = |op| IntCondition::new(IntExpr::sym(Sym::Nat("A".into())), op, IntExpr::sym(Sym::Nat("B".into())));
        let none = HashMap::new();
        assert_eq!(to_ge(&c(CmpOp::Eq), &none).len(), 2);
        let gt = &to_ge(&c(CmpOp::Gt), &none)[0];
        assert_eq!(gt.diff().to_string(), "-1 + nat_A - nat_B");
        let le = &to_ge(&c(CmpOp::Le), &none)[0];
        assert_eq!(le.diff().to_string(), "-nat_A + nat_B");
    }
}
