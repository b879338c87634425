//! Bit-blasting of diophantine systems and decoding of models.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::circuit::{Circuit, SInt, UInt};
use super::cnf::{Cnf, Lit};
use crate::constraints::{ConstraintKind, DiophantineSystem, Monomial, Sym};

/// Clause count beyond which encoding gives up.
pub const DEFAULT_CLAUSE_BUDGET: usize = 5_000_000;

pub const MIN_BITS: u32 = 2;
pub const MAX_BITS: u32 = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("bit size {0} outside {MIN_BITS}..={MAX_BITS}")]
    BitsOutOfRange(u32),
    #[error("encoding too large: more than {budget} clauses")]
    TooLarge { budget: usize },
}

/// Sign and magnitude bits of one unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymBits {
    /// Constant false for symbols known to be natural.
    pub sign: Lit,
    pub magnitude: Vec<Lit>,
}

/// Where each unknown lives in the formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    pub bits: u32,
    pub symbols: BTreeMap<Sym, SymBits>,
    /// Variables past the symbol bits belong to products and sums.
    pub first_aux_var: u32,
    pub num_vars: u32,
}

/// Integer values of the unknowns.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerModel {
    #[serde(with = "model_serde")]
    pub values: BTreeMap<Sym, BigInt>,
}

impl IntegerModel {
    pub fn get(&self, s: &Sym) -> Option<&BigInt> {
        self.values.get(s)
    }

    pub fn as_map(&self) -> HashMap<Sym, BigInt> {
        self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

mod model_serde {
    use std::collections::BTreeMap;

    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::constraints::Sym;

    pub fn serialize<S: Serializer>(m: &BTreeMap<Sym, BigInt>, s: S) -> Result<S::Ok, S::Error> {
        let flat: BTreeMap<String, String> = m.iter().map(|(k, v)| (k.key(), v.to_string())).collect();
        flat.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Sym, BigInt>, D::Error> {
        let flat = BTreeMap::<String, String>::deserialize(d)?;
        flat.into_iter()
            .map(|(k, v)| {
                let sym = Sym::from_key(&k).ok_or_else(|| serde::de::Error::custom(format!("bad symbol `{k}`")))?;
                let val = v.parse().map_err(|_| serde::de::Error::custom(format!("bad integer `{v}`")))?;
                Ok((sym, val))
            })
            .collect()
    }
}

struct Encoder {
    c: Circuit,
    budget: usize,
    syms: BTreeMap<Sym, SymBits>,
    /// Magnitude and sign parity of products of symbol prefixes.
    products: HashMap<Vec<Sym>, (UInt, Lit)>,
}

impl Encoder {
    fn check_budget(&self) -> Result<(), EncodeError> {
        if self.c.cnf.clauses.len() > self.budget {
            Err(EncodeError::TooLarge { budget: self.budget })
        } else {
            Ok(())
        }
    }

    fn sym_value(&self, s: &Sym) -> (UInt, Lit) {
        let b = &self.syms[s];
        let free = b.magnitude.iter().rposition(|&l| l != self.c.fls()).map_or(0, |i| i + 1);
        let hi = (BigInt::one() << free) - 1;
        (UInt { bits: b.magnitude[..free].to_vec(), hi }, b.sign)
    }

    /// Signed value of a monomial, built from cached prefix products.
    fn monomial(&mut self, m: &Monomial) -> Result<SInt, EncodeError> {
        let factors: Vec<Sym> =
            m.factors().iter().flat_map(|(s, e)| std::iter::repeat_n(s.clone(), *e as usize)).collect();
        let mut known = 0;
        for len in (1..=factors.len()).rev() {
            if self.products.contains_key(&factors[..len]) {
                known = len;
                break;
            }
        }
        if known == 0 {
            let v = self.sym_value(&factors[0]);
            self.products.insert(factors[..1].to_vec(), v);
            known = 1;
        }
        for len in known + 1..=factors.len() {
            let (prev_mag, prev_sign) = self.products[&factors[..len - 1]].clone();
            let (mag, sign) = self.sym_value(&factors[len - 1]);
            let prod = self.c.umul(&prev_mag, &mag);
            let parity = self.c.xor(prev_sign, sign);
            self.products.insert(factors[..len].to_vec(), (prod, parity));
            self.check_budget()?;
        }
        let (mag, sign) = self.products[&factors[..]].clone();
        Ok(self.c.sign_magnitude(sign, &mag))
    }

    fn poly<'a>(&mut self, terms: impl Iterator<Item = (&'a Monomial, &'a BigInt)>) -> Result<SInt, EncodeError> {
        let mut parts = Vec::new();
        for (m, coeff) in terms {
            if m.is_one() {
                parts.push(self.c.sconst(coeff));
            } else {
                let v = self.monomial(m)?;
                parts.push(self.c.smul_const(&v, coeff));
            }
            self.check_budget()?;
        }
        if parts.is_empty() {
            return Ok(self.c.sconst(&BigInt::zero()));
        }
        while parts.len() > 1 {
            let mut next = Vec::with_capacity(parts.len() / 2 + 1);
            for pair in parts.chunks(2) {
                next.push(match pair {
                    [a, b] => self.c.sadd(a, b),
                    [a] => a.clone(),
                    _ => unreachable!(),
                });
            }
            self.check_budget()?;
            parts = next;
        }
        Ok(parts.pop().expect("one part remains"))
    }
}

/// Bounds implied by constraints of the form `±s + b >= 0` (or `= 0`).
fn unit_bounds(sys: &DiophantineSystem) -> HashMap<Sym, (Option<BigInt>, Option<BigInt>)> {
    let mut out: HashMap<Sym, (Option<BigInt>, Option<BigInt>)> = HashMap::new();
    for c in &sys.constraints {
        let mut sym = None;
        let mut constant = BigInt::zero();
        let mut ok = true;
        for (m, coeff) in c.poly.terms() {
            match m.factors() {
                [] => constant = coeff.clone(),
                [(s, 1)] if sym.is_none() && (coeff.is_one() || *coeff == -BigInt::one()) => {
                    sym = Some((s.clone(), coeff.is_one()))
                }
                _ => ok = false,
            }
        }
        let Some((s, positive)) = sym.filter(|_| ok) else { continue };
        let entry = out.entry(s).or_default();
        let tighten_lo = |lo: &mut Option<BigInt>, v: BigInt| *lo = Some(lo.take().map_or(v.clone(), |l| l.max(v)));
        let tighten_hi = |hi: &mut Option<BigInt>, v: BigInt| *hi = Some(hi.take().map_or(v.clone(), |h| h.min(v)));
        // s + b >= 0 gives s >= -b; -s + b >= 0 gives s <= b.
        let bound = if positive { -constant } else { constant };
        let (lower, upper) = match c.kind {
            ConstraintKind::Ge => (positive, !positive),
            ConstraintKind::Eq => (true, true),
        };
        if lower {
            tighten_lo(&mut entry.0, bound.clone());
        }
        if upper {
            tighten_hi(&mut entry.1, bound);
        }
    }
    out
}

/// Encode `sys` with `bits` magnitude bits per unknown.
///
/// Magnitude bits that a single-symbol bound rules out are fixed to false,
/// and so is the sign of symbols bounded below by zero.
pub fn encode(sys: &DiophantineSystem, bits: u32, clause_budget: usize) -> Result<(Cnf, VarMap), EncodeError> {
    if !(MIN_BITS..=MAX_BITS).contains(&bits) {
        return Err(EncodeError::BitsOutOfRange(bits));
    }
    let mut c = Circuit::new();
    let mut syms = BTreeMap::new();
    let bounds = unit_bounds(sys);
    for s in &sys.symbols {
        let (lo, hi) = bounds.get(s).cloned().unwrap_or_default();
        let natural = matches!(s, Sym::Template(_)) || lo.as_ref().is_some_and(|l| !l.is_negative());
        let max_mag = match (&lo, &hi) {
            (Some(l), Some(h)) => Some(l.abs().max(h.abs())),
            _ => None,
        };
        let used = max_mag.map_or(bits, |m| (m.bits() as u32).min(bits));
        let sign = if natural { c.fls() } else { c.new_var() };
        let magnitude: Vec<Lit> = (0..bits).map(|i| if i < used { c.new_var() } else { c.fls() }).collect();
        if !natural {
            // no negative zero
            let mut clause = vec![!sign];
            clause.extend(&magnitude);
            c.clause(clause);
        }
        syms.insert(s.clone(), SymBits { sign, magnitude });
    }
    let first_aux_var = c.cnf.num_vars();
    let mut enc = Encoder { c, budget: clause_budget, syms, products: HashMap::new() };
    for con in &sys.constraints {
        let v = enc.poly(con.poly.terms())?;
        match con.kind {
            ConstraintKind::Ge => enc.c.assert_nonneg(&v),
            ConstraintKind::Eq => enc.c.assert_zero(&v),
        }
        enc.check_budget()?;
    }
    let cnf = enc.c.cnf;
    let vm = VarMap { bits, symbols: enc.syms, first_aux_var, num_vars: cnf.num_vars() };
    Ok((cnf, vm))
}

/// Read the unknowns off a full assignment.
pub fn decode(assignment: &[bool], vm: &VarMap) -> IntegerModel {
    let values = vm
        .symbols
        .iter()
        .map(|(s, b)| {
            let mut mag = BigInt::zero();
            for (i, l) in b.magnitude.iter().enumerate() {
                if l.eval(assignment) {
                    mag += BigInt::one() << i;
                }
            }
            let v = if b.sign.eval(assignment) { -mag } else { mag };
            (s.clone(), v)
        })
        .collect();
    IntegerModel { values }
}

/// Evaluate every constraint exactly.
pub fn check_model(sys: &DiophantineSystem, m: &IntegerModel) -> bool {
    let values = m.as_map();
    sys.constraints.iter().all(|c| c.holds(&values) == Some(true))
}
