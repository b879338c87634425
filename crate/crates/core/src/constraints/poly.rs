//! Sparse multivariate polynomials in canonical form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;

use super::expr::Sym;
use crate::scalar::Coefficient;

/// A product of symbols with positive exponents, sorted by symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Sym, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Sym) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn factors(&self) -> &[(Sym, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut merged: BTreeMap<Sym, u32> = self.0.iter().cloned().collect();
        for (s, e) in &other.0 {
            *merged.entry(s.clone()).or_insert(0) += e;
        }
        Monomial(merged.into_iter().collect())
    }

    /// Split into the factors satisfying `keep` and the rest.
    pub fn split(&self, keep: impl Fn(&Sym) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(s, _)| keep(s));
        (Monomial(a), Monomial(b))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial with coefficients in an integer ring `C`; zero terms are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<C: Coefficient> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Default for Poly<C> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

/// Overflow while operating on fixed-width coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("coefficient overflow")]
pub struct Overflow;

impl<C: Coefficient> Poly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(s: Sym) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(s), C::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = self.terms.keys().flat_map(|m| m.0.iter().map(|(s, _)| s.clone())).collect();
        out.sort();
        out.dedup();
        out
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                *old = old.clone() + c;
                if old.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn checked_add_term(&mut self, m: Monomial, c: C) -> Result<(), Overflow> {
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                *old = old.checked_add(&c).ok_or(Overflow)?;
                if old.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, Overflow> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.checked_add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_neg(&self) -> Result<Self, Overflow> {
        let zero = C::zero();
        let terms = self.terms.iter().map(|(m, c)| Ok((m.clone(), zero.checked_sub(c).ok_or(Overflow)?)));
        Ok(Poly { terms: terms.collect::<Result<_, Overflow>>()? })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_add(&other.checked_neg()?)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, Overflow> {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.checked_add_term(m1.mul(m2), c1.checked_mul(c2).ok_or(Overflow)?)?;
            }
        }
        Ok(out)
    }

    pub fn checked_scale(&self, k: &C) -> Result<Self, Overflow> {
        self.checked_mul(&Self::constant(k.clone()))
    }

    pub fn checked_pow(&self, e: u32) -> Result<Self, Overflow> {
        let mut acc = Self::constant(C::one());
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Replace symbols by polynomials.
    pub fn checked_substitute(&self, map: &HashMap<Sym, Poly<C>>) -> Result<Self, Overflow> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            for (s, e) in &m.0 {
                let factor = match map.get(s) {
                    Some(p) => p.checked_pow(*e)?,
                    None => Poly { terms: [(Monomial(vec![(s.clone(), *e)]), C::one())].into() },
                };
                term = term.checked_mul(&factor)?;
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }

    /// Evaluate under a full assignment; `None` on a missing symbol or overflow.
    pub fn eval(&self, values: &HashMap<Sym, C>) -> Option<C> {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (s, e) in &m.0 {
                t = t.checked_mul(&values.get(s)?.checked_pow(*e)?)?;
            }
            acc = acc.checked_add(&t)?;
        }
        Some(acc)
    }

    /// Group by the monomial over symbols satisfying `outer`; each group's
    /// coefficient is a polynomial over the remaining symbols.
    pub fn collect_by(&self, outer: impl Fn(&Sym) -> bool) -> BTreeMap<Monomial, Poly<C>> {
        let mut out: BTreeMap<Monomial, Poly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (o, inner) = m.split(&outer);
            out.entry(o).or_default().add_term(inner, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Convert coefficients into another ring; `None` if some coefficient does not fit.
    pub fn convert<D: Coefficient>(&self) -> Option<Poly<D>> {
        let terms = self.terms.iter().map(|(m, c)| Some((m.clone(), D::from_big(&c.to_big())?)));
        Some(Poly { terms: terms.collect::<Option<_>>()? })
    }

    /// Canonical JSON-friendly map from monomial text to coefficient text.
    pub fn to_string_map(&self) -> BTreeMap<String, String> {
        self.terms.iter().map(|(m, c)| (m.to_string(), c.to_string())).collect()
    }
}

/// Arbitrary-precision operations never overflow.
impl Poly<BigInt> {
    pub fn add(&self, o: &Self) -> Self {
        self.checked_add(o).expect("bigint")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.checked_sub(o).expect("bigint")
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("bigint")
    }

    pub fn neg(&self) -> Self {
        self.checked_neg().expect("bigint")
    }

    pub fn pow(&self, e: u32) -> Self {
        self.checked_pow(e).expect("bigint")
    }

    pub fn int(v: i64) -> Self {
        Self::constant(BigInt::from(v))
    }

    pub fn substitute(&self, map: &HashMap<Sym, Self>) -> Self {
        self.checked_substitute(map).expect("bigint")
    }
}

impl<C: Coefficient> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Coefficient;

    type P = Poly<BigInt>;

    fn x() -> P {
        P::var(Sym::Nat("X".into()))
    }

    fn y() -> P {
        P::var(Sym::Nat("Y".into()))
    }

    #[test]
    fn canonical_form_cancels() {
        let p = x().add(&y()).sub(&x());
        assert_eq!(p, y());
        assert!(x().sub(&x()).is_zero());
        let sq = x().add(&y()).pow(2);
        let expected = x().mul(&x()).add(&x().mul(&y()).mul(&P::int(2))).add(&y().mul(&y()));
        assert_eq!(sq, expected);
    }

    #[test]
    fn narrow_coefficients_overflow() {
        let big: Poly<i64> = Poly::constant(i64::MAX);
        assert_eq!(big.checked_add(&Poly::constant(1)), Err(Overflow));
        let p: Poly<i64> = x().convert().unwrap();
        assert_eq!(p.checked_scale(&3).unwrap().coefficient(&Monomial::var(Sym::Nat("X".into()))), 3);
    }

    #[test]
    fn collect_by_outer_symbols() {
        let a = P::var(Sym::Template("a".into()));
        let p = P::int(1).sub(&a).mul(&x()).add(&a.sub(&P::int(1)).mul(&y())).add(&P::int(1));
        let groups = p.collect_by(|s| matches!(s, Sym::Nat(_)));
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[&Monomial::one()], P::int(1));
        assert_eq!(groups[&Monomial::var(Sym::Nat("X".into()))], P::int(1).sub(&a));
    }

    #[test]
    fn evaluation_and_substitution() {
        let p = x().mul(&y()).add(&P::int(3));
        let vals: HashMap<Sym, BigInt> =
            [(Sym::Nat("X".into()), BigInt::from(2)), (Sym::Nat("Y".into()), BigInt::from(-5))].into();
        assert_eq!(p.eval(&vals), Some(BigInt::from(-7)));
        let sub: HashMap<Sym, P> = [(Sym::Nat("X".into()), y().add(&P::int(1)))].into();
        assert_eq!(p.substitute(&sub), y().mul(&y()).add(&y()).add(&P::int(3)));
        assert_eq!(p.to_string(), "3 + nat_X*nat_Y");
        assert_eq!(BigInt::from(3).to_big(), BigInt::from(3));
    }
}
