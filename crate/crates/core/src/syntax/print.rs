use std::fmt::{self, Write};

use super::ops::{self, Assoc};
use super::term::{Clause, Label, Program, Term};

fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

fn is_symbol_atom(name: &str) -> bool {
    !name.is_empty() && name != "." && name.chars().all(|c| "+-*/\\^<>=~:.?@#&$".contains(c))
}

pub fn atom_text(name: &str) -> String {
    if is_plain_atom(name) || is_symbol_atom(name) || matches!(name, "[]" | "!" | ";") {
        name.to_string()
    } else {
        let mut s = String::from("'");
        for c in name.chars() {
            match c {
                '\'' => s.push_str("\\'"),
                '\\' => s.push_str("\\\\"),
                '\n' => s.push_str("\\n"),
                c => s.push(c),
            }
        }
        s.push('\'');
        s
    }
}

struct Printer {
    moded: bool,
}

impl Printer {
    fn term(&self, t: &Term, max: u32, out: &mut String) {
        match t {
            Term::Var(v) => {
                let _ = write!(out, "{}", v.id);
                if self.moded {
                    match v.label {
                        Label::Free => {}
                        Label::Input => out.push_str(":in"),
                        Label::Integer => out.push_str(":int"),
                    }
                }
            }
            Term::Int(i) => {
                if i.sign() == num_bigint::Sign::Minus && max < 999 {
                    let _ = write!(out, "({i})");
                } else {
                    let _ = write!(out, "{i}");
                }
            }
            Term::App(name, args) => {
                if &**name == "." && args.len() == 2 {
                    self.list(t, out);
                    return;
                }
                if args.len() == 2 {
                    if let Some((p, assoc)) = ops::infix(name) {
                        let (lmax, rmax) = match assoc {
                            Assoc::Xfx => (p - 1, p - 1),
                            Assoc::Xfy => (p - 1, p),
                            Assoc::Yfx => (p, p - 1),
                        };
                        let paren = p > max;
                        if paren {
                            out.push('(');
                        }
                        self.term(&args[0], lmax, out);
                        if &**name == "," {
                            out.push_str(", ");
                        } else {
                            let _ = write!(out, " {name} ");
                        }
                        self.term(&args[1], rmax, out);
                        if paren {
                            out.push(')');
                        }
                        return;
                    }
                }
                out.push_str(&atom_text(name));
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.term(a, 999, out);
                    }
                    out.push(')');
                }
            }
        }
    }

    fn list(&self, t: &Term, out: &mut String) {
        out.push('[');
        let mut cur = t;
        let mut first = true;
        loop {
            match cur {
                Term::App(name, args) if &**name == "." && args.len() == 2 => {
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    self.term(&args[0], 999, out);
                    cur = &args[1];
                }
                Term::App(name, args) if &**name == "[]" && args.is_empty() => break,
                other => {
                    out.push('|');
                    self.term(other, 999, out);
                    break;
                }
            }
        }
        out.push(']');
    }
}

pub(crate) fn moded_string(t: &Term) -> String {
    let mut s = String::new();
    Printer { moded: true }.term(t, 1200, &mut s);
    s
}

/// Render goals as a comma-separated conjunction.
pub fn goal_string(goals: &[Term], moded: bool) -> String {
    let p = Printer { moded };
    let mut s = String::new();
    for (i, g) in goals.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        p.term(g, 999, &mut s);
    }
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        Printer { moded: false }.term(self, 1200, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        Printer { moded: false }.term(&self.head, 1199, &mut s);
        if !self.body.is_empty() {
            s.push_str(" :- ");
            s.push_str(&goal_string(&self.body, false));
        }
        s.push('.');
        f.write_str(&s)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.clauses() {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_term;
    use super::*;

    #[test]
    fn renders_lists_and_operators() {
        let t = parse_term("count(M,N,[M|L])").unwrap();
        assert_eq!(t.to_string(), "count(M,N,[M|L])");
        let t = parse_term("[a,b,c]").unwrap();
        assert_eq!(t.to_string(), "[a,b,c]");
        let t = parse_term("X is (A-B)-(C-D)").unwrap();
        assert_eq!(t.to_string(), "X is A - B - (C - D)");
        let t = parse_term("p(-1, 2-(-1), -(3), 'Hello world', f(','))").unwrap();
        assert_eq!(t.to_string(), "p(-1,2 - (-1),-(3),'Hello world',f(','))");
    }

    #[test]
    fn moded_rendering() {
        let t = Term::app("count", vec![Term::integer("M"), Term::input("N"), Term::var("L")]);
        assert_eq!(t.moded(), "count(M:int,N:in,L)");
    }
}
