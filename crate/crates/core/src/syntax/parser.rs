use super::print::atom_text;
use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::ops::{self, goal_kind, Assoc, GoalKind, PrefixAssoc};
use super::term::{Clause, Label, ModedQuery, Program, Term, Var};
use super::ParseError;

/// A `:- nt_query(...)` directive found in a source file.
#[derive(Clone, Debug, PartialEq)]
pub struct Directive {
    pub goal: Term,
    pub line: usize,
    pub col: usize,
}

/// A parsed `.pl` file: program clauses plus query directives.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceFile {
    pub program: Program,
    pub directives: Vec<Directive>,
}

impl SourceFile {
    pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
        let mut clauses = Vec::new();
        let mut directives = Vec::new();
        for item in read_items(text)? {
            match item {
                Item::Clause(c) => clauses.push(c),
                Item::Directive(d) => directives.push(d),
            }
        }
        Ok(SourceFile { program: Program::new(clauses), directives })
    }

    pub fn queries(&self) -> Result<Vec<ModedQuery>, ParseError> {
        self.directives.iter().map(|d| moded_query_from(d, &self.program)).collect()
    }

    /// The single query directive of the file.
    pub fn query(&self) -> Result<ModedQuery, ParseError> {
        match self.directives.as_slice() {
            [d] => moded_query_from(d, &self.program),
            [] => Err(ParseError { line: 1, col: 1, message: "no nt_query directive".into() }),
            [_, second, ..] => Err(ParseError {
                line: second.line,
                col: second.col,
                message: "more than one nt_query directive".into(),
            }),
        }
    }
}

/// Parse program clauses. `nt_query` directives are accepted and skipped.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    Ok(SourceFile::parse(text)?.program)
}

/// Parse a single `:- nt_query(p(m1,...,mn)).` directive against `program`.
///
/// Mode tokens: `-` free, `+` input, `+int` integer input.
pub fn parse_query_directive(text: &str, program: &Program) -> Result<ModedQuery, ParseError> {
    let items = read_items(text)?;
    match items.as_slice() {
        [Item::Directive(d)] => moded_query_from(d, program),
        _ => Err(ParseError { line: 1, col: 1, message: "expected exactly one `:- nt_query(...)` directive".into() }),
    }
}

/// Parse a single term (no trailing `.` required).
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(toks);
    let (t, _) = p.expr(1200)?;
    match p.peek().tok {
        Tok::End | Tok::Eof => Ok(t),
        _ => Err(p.error_here("unexpected token after term")),
    }
}

fn moded_query_from(d: &Directive, program: &Program) -> Result<ModedQuery, ParseError> {
    let err = |message: String| ParseError { line: d.line, col: d.col, message };
    let Term::App(name, args) = &d.goal else {
        return Err(err("nt_query expects a predicate with mode arguments".into()));
    };
    if !program.defines(name, args.len()) {
        let arities = program.arities_of(name);
        return Err(err(if arities.is_empty() {
            format!("unknown predicate {name}/{}", args.len())
        } else {
            format!(
                "arity mismatch: {name}/{} queried but the program defines {name} with arity {}",
                args.len(),
                arities.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ")
            )
        }));
    }
    let names = argument_names(program, name, args.len());
    let mut new_args = Vec::with_capacity(args.len());
    let mut modes = Vec::with_capacity(args.len());
    for (i, mode) in args.iter().enumerate() {
        let (label, text) = match mode {
            Term::App(m, a) if a.is_empty() && &**m == "-" => (Label::Free, "-"),
            Term::App(m, a) if a.is_empty() && &**m == "+" => (Label::Input, "+"),
            Term::App(m, a) if &**m == "+" && a.len() == 1 && a[0] == Term::atom("int") => (Label::Integer, "+int"),
            other => return Err(err(format!("unknown mode token `{other}` at argument {}", i + 1))),
        };
        new_args.push(Term::Var(Var::new(&names[i], label)));
        modes.push(text);
    }
    let atom = Term::App(name.clone(), new_args);
    let source_text = format!("{}({})", atom_text(name), modes.join(","));
    Ok(ModedQuery { source_text, atom })
}

/// Variable names for query arguments, borrowed from the first clause head
/// when it has distinct variables there.
fn argument_names(program: &Program, name: &str, arity: usize) -> Vec<String> {
    let mut names: Vec<String> = Vec::with_capacity(arity);
    let first = program.clauses_for(name, arity).first().map(|&i| &program.clause(i).head);
    for i in 0..arity {
        let candidate = match first.map(|h| &h.args()[i]) {
            Some(Term::Var(v)) if !v.id.name.starts_with('_') => v.id.name.to_string(),
            _ => format!("X{}", i + 1),
        };
        let mut unique = candidate.clone();
        let mut k = 1;
        while names.contains(&unique) {
            unique = format!("{candidate}{k}");
            k += 1;
        }
        names.push(unique);
    }
    names
}

enum Item {
    Clause(Clause),
    Directive(Directive),
}

fn read_items(text: &str) -> Result<Vec<Item>, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(toks);
    let mut items = Vec::new();
    while p.peek().tok != Tok::Eof {
        let (line, col) = (p.peek().line, p.peek().col);
        p.anon = 0;
        let (term, _) = p.expr(1200)?;
        if p.peek().tok != Tok::End {
            return Err(p.error_here("expected `.` at end of clause"));
        }
        p.advance();
        items.push(to_item(term, line, col)?);
    }
    Ok(items)
}

fn to_item(term: Term, line: usize, col: usize) -> Result<Item, ParseError> {
    let err = |message: String| ParseError { line, col, message };
    if let Term::App(name, args) = &term {
        if &**name == ":-" && args.len() == 1 {
            return match &args[0] {
                Term::App(d, dargs) if &**d == "nt_query" && dargs.len() == 1 => {
                    Ok(Item::Directive(Directive { goal: dargs[0].clone(), line, col }))
                }
                other => Err(err(format!("unsupported directive `{other}`"))),
            };
        }
    }
    let (head, body) = match term {
        Term::App(name, mut args) if &*name == ":-" && args.len() == 2 => {
            let body = args.pop().unwrap();
            let head = args.pop().unwrap();
            let mut goals = Vec::new();
            flatten_conj(body, &mut goals);
            (head, goals)
        }
        t => (t, Vec::new()),
    };
    match &head {
        Term::Var(_) => return Err(err("clause head is a variable".into())),
        Term::Int(_) => return Err(err("clause head is an integer".into())),
        Term::App(name, args) => {
            if ops::is_builtin_head(name, args.len()) {
                return Err(err(format!("cannot redefine built-in {name}/{}", args.len())));
            }
        }
    }
    check_functors(&head).map_err(err)?;
    for goal in &body {
        match goal {
            Term::Var(_) => return Err(err("variable goals are not supported".into())),
            Term::Int(_) => return Err(err("an integer is not a goal".into())),
            Term::App(name, args) => {
                if goal_kind(name, args.len()) == GoalKind::User && ops::is_unsupported_goal(name) {
                    return Err(err(format!("unsupported built-in {name}")));
                }
            }
        }
        check_functors(goal).map_err(err)?;
    }
    Ok(Item::Clause(Clause { head, body }))
}

fn check_functors(t: &Term) -> Result<(), String> {
    for s in t.subterms() {
        if let Term::App(f, args) = s {
            if ops::is_unsupported_functor(f, args.len()) {
                return Err(format!("unsupported built-in {f}"));
            }
        }
    }
    Ok(())
}

fn flatten_conj(t: Term, out: &mut Vec<Term>) {
    match t {
        Term::App(name, mut args) if &*name == "," && args.len() == 2 => {
            let rhs = args.pop().unwrap();
            let lhs = args.pop().unwrap();
            flatten_conj(lhs, out);
            flatten_conj(rhs, out);
        }
        other => out.push(other),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0, anon: 0 }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: &str) -> ParseError {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Var(v) => v.clone(),
            Tok::Name { text, .. } => text.clone(),
            Tok::Int(i) => i.to_string(),
            Tok::Punct(c) => c.to_string(),
            Tok::OpenCall => "(".into(),
            Tok::End => ".".into(),
            Tok::Eof => "end of input".into(),
        };
        ParseError { line: t.line, col: t.col, message: format!("{msg} (found `{found}`)") }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Punct(c) {
            self.advance();
            Ok(())
        } else {
            Err(self.error_here(&format!("expected `{c}`")))
        }
    }

    fn infix_name(&self) -> Option<String> {
        match &self.peek().tok {
            Tok::Name { text, quoted: false } => Some(text.clone()),
            Tok::Punct(',') => Some(",".into()),
            _ => None,
        }
    }

    fn expr(&mut self, max: u32) -> Result<(Term, u32), ParseError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        while let Some((name, (p, assoc))) = self.infix_name().and_then(|name| ops::infix(&name).map(|op| (name, op))) {
            if p > max {
                break;
            }
            let left_max = if assoc == Assoc::Yfx { p } else { p - 1 };
            if left_prec > left_max {
                break;
            }
            let right_max = if assoc == Assoc::Xfy { p } else { p - 1 };
            self.advance();
            let (right, _) = self.expr(right_max)?;
            left = Term::App(Arc::from(name.as_str()), vec![left, right]);
            left_prec = p;
        }
        Ok((left, left_prec))
    }

    fn can_start_term(&self, tok: &Tok) -> bool {
        match tok {
            Tok::Var(_) | Tok::Int(_) | Tok::Punct('(') | Tok::Punct('[') => true,
            Tok::Name { text, quoted } => *quoted || ops::infix(text).is_none() || ops::prefix(text).is_some(),
            _ => false,
        }
    }

    fn primary(&mut self, max: u32) -> Result<(Term, u32), ParseError> {
        let tok = self.advance();
        match tok.tok {
            Tok::Int(i) => Ok((Term::Int(i), 0)),
            Tok::Var(name) => {
                if name == "_" {
                    self.anon += 1;
                    Ok((Term::var(&format!("_G{}", self.anon)), 0))
                } else {
                    Ok((Term::var(&name), 0))
                }
            }
            // after an infix operator, `(` glued to the operator name is a plain paren
            Tok::Punct('(') | Tok::OpenCall => {
                let (t, _) = self.expr(1200)?;
                self.expect_punct(')')?;
                Ok((t, 0))
            }
            Tok::Punct('[') => {
                if self.peek().tok == Tok::Punct(']') {
                    self.advance();
                    return Ok((Term::nil(), 0));
                }
                let mut items = vec![self.expr(999)?.0];
                while self.peek().tok == Tok::Punct(',') {
                    self.advance();
                    items.push(self.expr(999)?.0);
                }
                let tail = if self.peek().tok == Tok::Punct('|') {
                    self.advance();
                    self.expr(999)?.0
                } else {
                    Term::nil()
                };
                self.expect_punct(']')?;
                Ok((items.into_iter().rev().fold(tail, |acc, h| Term::cons(h, acc)), 0))
            }
            Tok::Name { text, quoted } => {
                if self.peek().tok == Tok::OpenCall {
                    self.advance();
                    let mut args = vec![self.expr(999)?.0];
                    while self.peek().tok == Tok::Punct(',') {
                        self.advance();
                        args.push(self.expr(999)?.0);
                    }
                    self.expect_punct(')')?;
                    return Ok((Term::App(Arc::from(text.as_str()), args), 0));
                }
                if !quoted && text == "-" {
                    if let Tok::Int(i) = &self.peek().tok {
                        if self.peek().start == tok.end {
                            let v = -i.clone();
                            self.advance();
                            return Ok((Term::Int(v), 0));
                        }
                    }
                }
                if !quoted {
                    if let Some((p, assoc)) = ops::prefix(&text) {
                        let next = self.peek().tok.clone();
                        // `- (` with the operand being an infix continuation is still an operand
                        let operand_follows = self.can_start_term(&next)
                            && !(matches!(next, Tok::Name { .. }) && self.is_infix_followed_by_operand_end());
                        if operand_follows {
                            let p = p.min(max);
                            let arg_max = if assoc == PrefixAssoc::Fy { p } else { p.saturating_sub(1) };
                            let (arg, _) = self.expr(arg_max)?;
                            return Ok((Term::App(Arc::from(text.as_str()), vec![arg]), p));
                        }
                    }
                }
                Ok((Term::App(Arc::from(text.as_str()), Vec::new()), 0))
            }
            Tok::Punct(c) => {
                self.pos -= 1;
                Err(self.error_here(&format!("unexpected `{c}`")))
            }
            Tok::End | Tok::Eof => {
                self.pos -= 1;
                Err(self.error_here("unexpected end of clause"))
            }
        }
    }

    /// `- = x`: a prefix-operator name followed by an infix operator that is
    /// not itself a prefix operator means the first name is an atom operand.
    fn is_infix_followed_by_operand_end(&self) -> bool {
        match &self.peek().tok {
            Tok::Name { text, quoted: false } => {
                ops::infix(text).is_some()
                    && ops::prefix(text).is_none()
                    && !matches!(self.peek_at(1).tok, Tok::OpenCall)
            }
            _ => false,
        }
    }
}
