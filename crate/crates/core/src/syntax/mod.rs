//! Terms, clauses and the supported Prolog subset.
//!
//! The concrete syntax is Edinburgh-style clauses with `%` and `/* */`
//! comments, plus one query directive per file:
//!
//! ```text
//! :- nt_query(count_to(+int, -)).
//! ```

mod lexer;
pub mod ops;
mod parser;
mod print;
mod term;

use thiserror::Error;

pub use ops::{CmpOp, GoalKind};
pub use parser::{parse_program, parse_query_directive, parse_term, Directive, SourceFile};
pub use print::{atom_text, goal_string};
pub use term::{Clause, Label, ModedQuery, Program, Subst, Term, Var, VarId};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}
