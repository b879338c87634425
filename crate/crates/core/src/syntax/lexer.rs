use num_bigint::BigInt;

use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Var(String),
    /// Atom or operator name; `quoted` names never act as operators.
    Name {
        text: String,
        quoted: bool,
    },
    Int(BigInt),
    Punct(char),
    /// `(` directly after a name: functional notation.
    OpenCall,
    End,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub start: usize,
    pub end: usize,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

fn is_symbol_char(c: char) -> bool {
    SYMBOL_CHARS.contains(c)
}

fn is_alnum(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let n = chars.len();
    let byte_at = |i: usize| if i < n { chars[i].0 } else { src.len() };
    while i < n {
        let (pos, c) = chars[i];
        let col = pos - line_start + 1;
        let (tok_line, tok_col) = (line, col);
        let err = move |msg: String| ParseError { line: tok_line, col: tok_col, message: msg };
        if c == '\n' {
            line += 1;
            line_start = pos + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '%' {
            while i < n && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && i + 1 < n && chars[i + 1].1 == '*' {
            i += 2;
            loop {
                if i + 1 >= n {
                    return Err(err("unterminated block comment".into()));
                }
                if chars[i].1 == '\n' {
                    line += 1;
                    line_start = chars[i].0 + 1;
                }
                if chars[i].1 == '*' && chars[i + 1].1 == '/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        let start_i = i;
        let tok = if c.is_ascii_uppercase() || c == '_' {
            while i < n && is_alnum(chars[i].1) {
                i += 1;
            }
            Tok::Var(src[pos..byte_at(i)].to_string())
        } else if c.is_ascii_lowercase() {
            while i < n && is_alnum(chars[i].1) {
                i += 1;
            }
            Tok::Name { text: src[pos..byte_at(i)].to_string(), quoted: false }
        } else if c.is_ascii_digit() {
            while i < n && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits = &src[pos..byte_at(i)];
            Tok::Int(digits.parse().map_err(|_| err(format!("bad integer literal {digits}")))?)
        } else if c == '\'' {
            i += 1;
            let mut text = String::new();
            loop {
                if i >= n {
                    return Err(err("unterminated quoted atom".into()));
                }
                let ch = chars[i].1;
                if ch == '\'' {
                    if i + 1 < n && chars[i + 1].1 == '\'' {
                        text.push('\'');
                        i += 2;
                        continue;
                    }
                    i += 1;
                    break;
                }
                if ch == '\\' && i + 1 < n {
                    let esc = chars[i + 1].1;
                    text.push(match esc {
                        'n' => '\n',
                        't' => '\t',
                        other => other,
                    });
                    i += 2;
                    continue;
                }
                if ch == '\n' {
                    return Err(err("newline in quoted atom".into()));
                }
                text.push(ch);
                i += 1;
            }
            Tok::Name { text, quoted: true }
        } else if matches!(c, '(' | ')' | '[' | ']' | ',' | '|') {
            i += 1;
            let follows_name = matches!(out.last(), Some(Token { tok: Tok::Name { .. }, end, .. }) if *end == pos);
            if c == '(' && follows_name {
                Tok::OpenCall
            } else {
                Tok::Punct(c)
            }
        } else if c == '!' || c == ';' {
            i += 1;
            Tok::Name { text: c.to_string(), quoted: false }
        } else if is_symbol_char(c) {
            // end token: '.' followed by layout, '%' or end of input
            if c == '.' && (i + 1 >= n || chars[i + 1].1.is_whitespace() || chars[i + 1].1 == '%') {
                i += 1;
                Tok::End
            } else {
                while i < n && is_symbol_char(chars[i].1) {
                    i += 1;
                }
                Tok::Name { text: src[pos..byte_at(i)].to_string(), quoted: false }
            }
        } else {
            return Err(err(format!("unexpected character {c:?}")));
        };
        out.push(Token { tok, line, col, start: pos, end: byte_at(i) });
        debug_assert!(i > start_i);
    }
    let end = src.len();
    out.push(Token { tok: Tok::Eof, line, col: end - line_start + 1, start: end, end });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn clause_tokens() {
        let t = toks("count(M,N,[M|L]):- M > N. % done");
        assert_eq!(t[0], Tok::Name { text: "count".into(), quoted: false });
        assert_eq!(t[1], Tok::OpenCall);
        assert!(t.contains(&Tok::Punct('|')));
        assert!(t.contains(&Tok::Name { text: ":-".into(), quoted: false }));
        assert_eq!(t[t.len() - 2], Tok::End);
    }

    #[test]
    fn end_needs_layout() {
        let t = toks("X = '.'.");
        assert_eq!(t[2], Tok::Name { text: ".".into(), quoted: true });
        assert_eq!(t[3], Tok::End);
    }

    #[test]
    fn positions() {
        let t = tokenize("a.\n  b(X).").unwrap();
        assert_eq!((t[2].line, t[2].col), (2, 3));
    }

    #[test]
    fn space_before_paren_is_not_a_call() {
        assert_eq!(toks("- (1)")[1], Tok::Punct('('));
        assert_eq!(toks("-(1)")[1], Tok::OpenCall);
    }
}
