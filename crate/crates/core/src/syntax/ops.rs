//! Operator table and built-in classification.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixAssoc {
    Fy,
    Fx,
}

pub fn infix(name: &str) -> Option<(u32, Assoc)> {
    use Assoc::*;
    Some(match name {
        ":-" => (1200, Xfx),
        ";" => (1100, Xfy),
        "->" => (1050, Xfy),
        "," => (1000, Xfy),
        "=" | "\\=" | "==" | "\\==" | "@<" | "@>" | "@=<" | "@>=" | "=.." | "is" | "<" | ">" | "=<" | ">=" | "=:="
        | "=\\=" | "=/=" => (700, Xfx),
        "+" | "-" | "/\\" | "\\/" => (500, Yfx),
        "*" | "/" | "//" | "mod" | "rem" | "<<" | ">>" => (400, Yfx),
        "**" => (200, Xfx),
        "^" => (200, Xfy),
        _ => return None,
    })
}

pub fn prefix(name: &str) -> Option<(u32, PrefixAssoc)> {
    use PrefixAssoc::*;
    Some(match name {
        ":-" => (1200, Fx),
        "\\+" => (900, Fy),
        "-" | "+" | "\\" => (200, Fy),
        _ => return None,
    })
}

/// Comparison operators forming integer conditions. `=/=` is read as `=\=`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum CmpOp {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=<")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=:=")]
    Eq,
    #[serde(rename = "=\\=")]
    Ne,
}

impl CmpOp {
    pub fn from_name(name: &str) -> Option<CmpOp> {
        Some(match name {
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            "=<" => CmpOp::Le,
            "<" => CmpOp::Lt,
            "=:=" => CmpOp::Eq,
            "=\\=" | "=/=" => CmpOp::Ne,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Le => "=<",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=:=",
            CmpOp::Ne => "=\\=",
        }
    }

    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

impl std::fmt::Display for CmpOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How a goal atom is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoalKind {
    User,
    /// `V is Expr`
    Is,
    Compare(CmpOp),
}

pub fn goal_kind(name: &str, arity: usize) -> GoalKind {
    if arity == 2 {
        if name == "is" {
            return GoalKind::Is;
        }
        if let Some(op) = CmpOp::from_name(name) {
            return GoalKind::Compare(op);
        }
    }
    GoalKind::User
}

/// Control constructs and standard predicates outside the supported subset.
const UNSUPPORTED_GOALS: &[&str] = &[
    "!",
    "\\+",
    ";",
    "->",
    "=",
    "\\=",
    "==",
    "\\==",
    "@<",
    "@>",
    "@=<",
    "@>=",
    "=..",
    "call",
    "fail",
    "false",
    "true",
    "not",
    "findall",
    "bagof",
    "setof",
    "assert",
    "asserta",
    "assertz",
    "retract",
    "write",
    "writeln",
    "print",
    "nl",
    "functor",
    "arg",
    "copy_term",
    "var",
    "nonvar",
    "atom",
    "number",
    "integer",
    "atomic",
    "compound",
    "catch",
    "throw",
    "halt",
];

/// Arithmetic functors beyond `+`, `-`, `*` and unary minus.
const UNSUPPORTED_FUNCTORS: &[&str] = &["/", "//", "mod", "rem", "**", "^", "/\\", "\\/", "<<", ">>", "\\"];

pub fn is_unsupported_goal(name: &str) -> bool {
    UNSUPPORTED_GOALS.contains(&name)
}

pub fn is_unsupported_functor(name: &str, arity: usize) -> bool {
    arity > 0 && UNSUPPORTED_FUNCTORS.contains(&name)
}

pub fn is_builtin_head(name: &str, arity: usize) -> bool {
    goal_kind(name, arity) != GoalKind::User || is_unsupported_goal(name)
}
