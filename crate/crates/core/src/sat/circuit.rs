//! Gate-level arithmetic over CNF literals with constant folding.
//!
//! Integers are little-endian bit vectors. Every vector carries an exact
//! value interval, which fixes its width: adders and multipliers never wrap.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cnf::{Cnf, Lit};

/// A CNF under construction, with a literal fixed to true.
#[derive(Debug)]
pub struct Circuit {
    pub cnf: Cnf,
    tru: Lit,
}

impl Default for Circuit {
    fn default() -> Self {
        Self::new()
    }
}

/// Two's-complement integer whose value lies in `lo..=hi`.
#[derive(Clone, Debug)]
pub struct SInt {
    pub bits: Vec<Lit>,
    pub lo: BigInt,
    pub hi: BigInt,
}

/// Unsigned integer whose value lies in `0..=hi`.
#[derive(Clone, Debug)]
pub struct UInt {
    pub bits: Vec<Lit>,
    pub hi: BigInt,
}

/// Bits needed for an unsigned value up to `hi`.
fn unsigned_width(hi: &BigInt) -> usize {
    hi.bits() as usize
}

/// Bits needed for a two's-complement value in `lo..=hi`.
fn signed_width(lo: &BigInt, hi: &BigInt) -> usize {
    let mut w = 1;
    let fits = |w: usize| {
        let half = BigInt::one() << (w - 1);
        -&half <= *lo && *hi < half
    };
    while !fits(w) {
        w += 1;
    }
    w
}

impl Circuit {
    pub fn new() -> Self {
        let mut cnf = Cnf::new();
        let tru = cnf.new_var();
        cnf.add_clause([tru]);
        Circuit { cnf, tru }
    }

    pub fn tru(&self) -> Lit {
        self.tru
    }

    pub fn fls(&self) -> Lit {
        !self.tru
    }

    pub fn constant(&self, b: bool) -> Lit {
        if b {
            self.tru
        } else {
            !self.tru
        }
    }

    fn is_const(&self, l: Lit) -> Option<bool> {
        if l == self.tru {
            Some(true)
        } else if l == !self.tru {
            Some(false)
        } else {
            None
        }
    }

    pub fn new_var(&mut self) -> Lit {
        self.cnf.new_var()
    }

    pub fn clause(&mut self, c: impl Into<Vec<Lit>>) {
        let mut c: Vec<Lit> = c.into();
        if c.iter().any(|&l| self.is_const(l) == Some(true)) {
            return;
        }
        c.retain(|&l| self.is_const(l).is_none());
        self.cnf.add_clause(c);
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        match (self.is_const(a), self.is_const(b)) {
            (Some(false), _) | (_, Some(false)) => return self.fls(),
            (Some(true), _) => return b,
            (_, Some(true)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        if a == !b {
            return self.fls();
        }
        let o = self.new_var();
        self.cnf.add_clause([!o, a]);
        self.cnf.add_clause([!o, b]);
        self.cnf.add_clause([o, !a, !b]);
        o
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        match (self.is_const(a), self.is_const(b)) {
            (Some(x), _) => return if x { !b } else { b },
            (_, Some(y)) => return if y { !a } else { a },
            _ => {}
        }
        if a == b {
            return self.fls();
        }
        if a == !b {
            return self.tru();
        }
        let o = self.new_var();
        self.cnf.add_clause([!o, a, b]);
        self.cnf.add_clause([!o, !a, !b]);
        self.cnf.add_clause([o, !a, b]);
        self.cnf.add_clause([o, a, !b]);
        o
    }

    /// Sum and carry of three bits.
    pub fn full_add(&mut self, a: Lit, b: Lit, c: Lit) -> (Lit, Lit) {
        let ab = self.xor(a, b);
        let sum = self.xor(ab, c);
        let both = self.and(a, b);
        let prop = self.and(ab, c);
        (sum, self.or(both, prop))
    }

    pub fn sconst(&self, v: &BigInt) -> SInt {
        let w = signed_width(v, v);
        let mask = (BigInt::one() << w) - 1;
        let raw = v & &mask;
        let bits = (0..w).map(|i| self.constant(raw.bit(i as u64))).collect();
        SInt { bits, lo: v.clone(), hi: v.clone() }
    }

    fn sext(&self, x: &SInt, w: usize) -> Vec<Lit> {
        let mut bits = x.bits.clone();
        let sign = *bits.last().expect("non-empty vector");
        bits.resize(w.max(bits.len()), sign);
        bits
    }

    fn trim(&self, mut bits: Vec<Lit>, lo: BigInt, hi: BigInt) -> SInt {
        bits.truncate(signed_width(&lo, &hi));
        SInt { bits, lo, hi }
    }

    /// Ripple-carry sum of equal-width vectors, dropping the final carry.
    fn ripple(&mut self, a: &[Lit], b: &[Lit], carry_in: Lit) -> Vec<Lit> {
        let mut carry = carry_in;
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let (s, c) = self.full_add(x, y, carry);
            out.push(s);
            carry = c;
        }
        out
    }

    pub fn sadd(&mut self, a: &SInt, b: &SInt) -> SInt {
        let (lo, hi) = (&a.lo + &b.lo, &a.hi + &b.hi);
        let w = a.bits.len().max(b.bits.len()) + 1;
        let (x, y) = (self.sext(a, w), self.sext(b, w));
        let fls = self.fls();
        let sum = self.ripple(&x, &y, fls);
        self.trim(sum, lo, hi)
    }

    /// `-x` when `neg` holds, `x` otherwise.
    pub fn cond_neg(&mut self, x: &SInt, neg: Lit) -> SInt {
        let lo = (-&x.hi).min(x.lo.clone());
        let hi = (-&x.lo).max(x.hi.clone());
        let w = x.bits.len() + 1;
        let ext = self.sext(x, w);
        let flipped: Vec<Lit> = ext.iter().map(|&l| self.xor(l, neg)).collect();
        let zero = vec![self.fls(); w];
        let sum = self.ripple(&flipped, &zero, neg);
        self.trim(sum, lo, hi)
    }

    pub fn smul_const(&mut self, x: &SInt, c: &BigInt) -> SInt {
        if c.is_zero() {
            return self.sconst(c);
        }
        let m = c.abs();
        let mut acc: Option<SInt> = None;
        for i in 0..m.bits() {
            if !m.bit(i) {
                continue;
            }
            let shift = |v: &BigInt| v << i;
            let mut bits = vec![self.fls(); i as usize];
            bits.extend(&x.bits);
            let term = SInt { bits, lo: shift(&x.lo), hi: shift(&x.hi) };
            acc = Some(match acc {
                None => term,
                Some(a) => self.sadd(&a, &term),
            });
        }
        let acc = acc.expect("non-zero constant has a set bit");
        if c.is_negative() {
            let t = self.tru();
            self.cond_neg(&acc, t)
        } else {
            acc
        }
    }

    pub fn umul(&mut self, a: &UInt, b: &UInt) -> UInt {
        let hi = &a.hi * &b.hi;
        let mut acc: Option<UInt> = None;
        for (i, &bi) in b.bits.iter().enumerate() {
            let mut row = vec![self.fls(); i];
            for &aj in &a.bits {
                let p = self.and(aj, bi);
                row.push(p);
            }
            let row = UInt { bits: row, hi: &a.hi << i };
            acc = Some(match acc {
                None => row,
                Some(prev) => self.uadd(&prev, &row),
            });
        }
        let mut bits = acc.map(|u| u.bits).unwrap_or_default();
        bits.resize(unsigned_width(&hi).max(bits.len()), self.fls());
        bits.truncate(unsigned_width(&hi));
        UInt { bits, hi }
    }

    pub fn uadd(&mut self, a: &UInt, b: &UInt) -> UInt {
        let hi = &a.hi + &b.hi;
        let w = unsigned_width(&hi);
        let f = self.fls();
        let pad = |v: &[Lit]| {
            let mut v = v.to_vec();
            v.resize(w, f);
            v
        };
        let (x, y) = (pad(&a.bits), pad(&b.bits));
        let bits = self.ripple(&x, &y, f);
        UInt { bits, hi }
    }

    /// Signed value `(-1)^sign * mag`.
    pub fn sign_magnitude(&mut self, sign: Lit, mag: &UInt) -> SInt {
        let mut bits = mag.bits.clone();
        bits.push(self.fls());
        let x = SInt { bits, lo: BigInt::zero(), hi: mag.hi.clone() };
        self.cond_neg(&x, sign)
    }

    /// Require `x >= 0`.
    pub fn assert_nonneg(&mut self, x: &SInt) {
        let msb = *x.bits.last().expect("non-empty vector");
        self.clause([!msb]);
    }

    /// Require `x == 0`.
    pub fn assert_zero(&mut self, x: &SInt) {
        for &b in &x.bits.clone() {
            self.clause([!b]);
        }
    }
}

/// Read a two's-complement vector back from an assignment.
pub fn read_signed(bits: &[Lit], assignment: &[bool]) -> BigInt {
    let mut v = BigInt::zero();
    for (i, l) in bits.iter().enumerate() {
        if l.eval(assignment) {
            v += BigInt::one() << i;
        }
    }
    if bits.last().is_some_and(|l| l.eval(assignment)) {
        v -= BigInt::one() << bits.len();
    }
    v
}
