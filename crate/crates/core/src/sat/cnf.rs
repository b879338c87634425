//! CNF formulas and DIMACS text.

use std::fmt::{self, Write as _};

use thiserror::Error;

/// A literal: variable index times two, plus one when negated. Variables start at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, negated: bool) -> Lit {
        Lit(var << 1 | negated as u32)
    }

    pub fn pos(var: u32) -> Lit {
        Lit::new(var, false)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Signed 1-based DIMACS number.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(n: i64) -> Option<Lit> {
        if n == 0 {
            return None;
        }
        let var = u32::try_from(n.unsigned_abs() - 1).ok()?;
        Some(Lit::new(var, n < 0))
    }

    /// Truth value under a full assignment indexed by variable.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var() as usize] != self.is_negated()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::pos(self.num_vars - 1)
    }

    pub fn add_clause(&mut self, clause: impl Into<Vec<Lit>>) {
        let clause = clause.into();
        debug_assert!(clause.iter().all(|l| l.var() < self.num_vars));
        self.clauses.push(clause);
    }

    /// True if every clause has a true literal.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
        let mut cnf = Cnf::new();
        let mut declared: Option<(u32, usize)> = None;
        let mut current = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["cnf", v, c] => {
                        let v = v.parse().map_err(|_| DimacsError::new(i, "bad variable count"))?;
                        let c = c.parse().map_err(|_| DimacsError::new(i, "bad clause count"))?;
                        cnf.num_vars = v;
                        declared = Some((v, c));
                    }
                    _ => return Err(DimacsError::new(i, "malformed problem line")),
                }
                continue;
            }
            let Some((nv, _)) = declared else {
                return Err(DimacsError::new(i, "clause before problem line"));
            };
            for tok in line.split_whitespace() {
                let n: i64 = tok.parse().map_err(|_| DimacsError::new(i, format!("bad literal `{tok}`")))?;
                match Lit::from_dimacs(n) {
                    None => cnf.clauses.push(std::mem::take(&mut current)),
                    Some(l) if l.var() < nv => current.push(l),
                    Some(_) => return Err(DimacsError::new(i, format!("literal {n} exceeds variable count"))),
                }
            }
        }
        if !current.is_empty() {
            cnf.clauses.push(current);
        }
        match declared {
            None => Err(DimacsError::new(0, "missing problem line")),
            Some((_, c)) if c != cnf.clauses.len() => {
                Err(DimacsError::new(0, format!("header declares {c} clauses, found {}", cnf.clauses.len())))
            }
            Some(_) => Ok(cnf),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("DIMACS line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

impl DimacsError {
    fn new(line0: usize, message: impl Into<String>) -> Self {
        DimacsError { line: line0 + 1, message: message.into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        for n in [1i64, -1, 7, -42] {
            assert_eq!(Lit::from_dimacs(n).unwrap().to_dimacs(), n);
        }
        assert_eq!(Lit::from_dimacs(0), None);
        assert_eq!(!Lit::pos(3), Lit::new(3, true));
    }

    #[test]
    fn dimacs_round_trip() {
        let mut cnf = Cnf::new();
        let (x, y) = (cnf.new_var(), cnf.new_var());
        cnf.add_clause([x]);
        cnf.add_clause([!x, y]);
        let text = cnf.to_dimacs();
        assert_eq!(text, "p cnf 2 2\n1 0\n-1 2 0\n");
        assert_eq!(Cnf::parse_dimacs(&text).unwrap(), cnf);
    }

    #[test]
    fn dimacs_errors() {
        assert!(Cnf::parse_dimacs("1 2 0\n").is_err());
        assert!(Cnf::parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(Cnf::parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(Cnf::parse_dimacs("c comment\np cnf 2 1\n1\n-2 0\n").is_ok());
    }
}
