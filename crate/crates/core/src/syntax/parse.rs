//! Recursive descent parser for the concrete term syntax.
//!
//! ```text
//! term   := lam | oplus
//! lam    := ("\" | "lam") ident "." term
//! oplus  := app ("+[" rational "]" app)*      left-associative
//! app    := atom+                             left-associative
//! atom   := ident | "0" | "1" | "coin" | "(" term ")"
//!         | "if" term "then" term "else" term
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{Rational, Term};
use crate::rewrite::CalculusVariant;

const KEYWORDS: [&str; 5] = ["if", "then", "else", "coin", "lam"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Malformed input.
    Syntax(String),
    /// Use of a name that is not bound.
    Scope(String),
    /// `+[p]` in the plain calculus.
    Variant,
    /// `+[p]` with `p` outside `(0, 1)`.
    Probability(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::Scope(name) => write!(f, "unbound name `{name}`"),
            ParseErrorKind::Variant => {
                f.write_str("`+[p]` is only available in the internalized calculus")
            }
            ParseErrorKind::Probability(p) => {
                write!(f, "probability `{p}` must lie strictly between 0 and 1")
            }
        }
    }
}

impl core::error::Error for ParseError {}

/// A parsed term together with the names of its free variables.
///
/// `free[k]` is context slot `k`. Slots are numbered in order of first
/// occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub term: Term,
    pub free: Vec<String>,
}

/// Parses a possibly open term; free names become context slots.
pub fn parse(text: &str, variant: CalculusVariant) -> Result<Parsed, ParseError> {
    let mut p = Parser::new(text, variant, Scope::Open(Vec::new()))?;
    let term = p.parse_all()?;
    let free = match p.scope {
        Scope::Open(names) => names,
        _ => unreachable!(),
    };
    Ok(Parsed { term, free })
}

/// Parses a closed term; any free name is a scope error.
pub fn parse_closed(text: &str, variant: CalculusVariant) -> Result<Term, ParseError> {
    Parser::new(text, variant, Scope::Closed)?.parse_all()
}

/// Parses a term in a fixed context; `names[k]` is context slot `k`.
pub fn parse_in(text: &str, variant: CalculusVariant, names: &[&str]) -> Result<Term, ParseError> {
    let names = names.iter().map(|s| s.to_string()).collect();
    Parser::new(text, variant, Scope::Fixed(names))?.parse_all()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    If,
    Then,
    Else,
    Coin,
    Num(String),
    Ident(String),
    Oplus(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::If => f.write_str("`if`"),
            Tok::Then => f.write_str("`then`"),
            Tok::Else => f.write_str("`else`"),
            Tok::Coin => f.write_str("`coin`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Ident(n) => write!(f, "`{n}`"),
            Tok::Oplus(p) => write!(f, "`+[{p}]`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    let err = |msg: String, line, column| ParseError {
        kind: ParseErrorKind::Syntax(msg),
        line,
        column,
    };
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut core::iter::Peekable<core::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '\\' => {
                bump(&mut chars);
                Tok::Lambda
            }
            '.' => {
                bump(&mut chars);
                Tok::Dot
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '+' => {
                bump(&mut chars);
                if chars.peek() != Some(&'[') {
                    return Err(err("expected `[` after `+`".into(), l, col));
                }
                bump(&mut chars);
                let mut prob = String::new();
                loop {
                    match bump(&mut chars) {
                        Some(']') => break,
                        Some(c) => prob.push(c),
                        None => return Err(err("unterminated `+[`".into(), l, col)),
                    }
                }
                Tok::Oplus(prob.trim().into())
            }
            c if c.is_ascii_digit() => {
                let mut n = String::new();
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    n.push(d);
                    bump(&mut chars);
                }
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut n = String::new();
                while let Some(&d) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    n.push(d);
                    bump(&mut chars);
                }
                match n.as_str() {
                    "lam" => Tok::Lambda,
                    "if" => Tok::If,
                    "then" => Tok::Then,
                    "else" => Tok::Else,
                    "coin" => Tok::Coin,
                    _ => Tok::Ident(n),
                }
            }
            other => {
                return Err(err(
                    alloc::format!("unexpected character `{other}`"),
                    l,
                    col,
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

enum Scope {
    Open(Vec<String>),
    Closed,
    Fixed(Vec<String>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    variant: CalculusVariant,
    scope: Scope,
    /// Bound names, innermost last.
    bound: Vec<String>,
}

impl Parser {
    fn new(text: &str, variant: CalculusVariant, scope: Scope) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            variant,
            scope,
            bound: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            kind,
            line: s.line,
            column: s.column,
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self.peek().to_string();
        self.error_here(ParseErrorKind::Syntax(alloc::format!(
            "expected {wanted}, found {found}"
        )))
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn parse_all(&mut self) -> Result<Term, ParseError> {
        let t = self.term()?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(t)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            self.advance();
            let Tok::Ident(name) = self.peek().clone() else {
                return Err(self.unexpected("a binder name"));
            };
            self.advance();
            self.expect(Tok::Dot)?;
            self.bound.push(name);
            let body = self.term();
            self.bound.pop();
            return Ok(Term::lam(body?));
        }
        self.oplus()
    }

    fn oplus(&mut self) -> Result<Term, ParseError> {
        let mut left = self.app()?;
        while let Tok::Oplus(text) = self.peek().clone() {
            if self.variant == CalculusVariant::Plain {
                return Err(self.error_here(ParseErrorKind::Variant));
            }
            let p: Rational = text.parse().map_err(|_| {
                self.error_here(ParseErrorKind::Syntax(alloc::format!(
                    "invalid rational `{text}`"
                )))
            })?;
            if !p.is_proper_probability() {
                return Err(self.error_here(ParseErrorKind::Probability(text)));
            }
            self.advance();
            let right = self.app()?;
            left = Term::Oplus(p, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Num(_) | Tok::Coin | Tok::LParen | Tok::If
        )
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        if !self.starts_atom() {
            return Err(self.unexpected("a term"));
        }
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let t = self.resolve(&name)?;
                self.advance();
                Ok(t)
            }
            Tok::Num(n) => match n.as_str() {
                "0" => {
                    self.advance();
                    Ok(Term::Zero)
                }
                "1" => {
                    self.advance();
                    Ok(Term::One)
                }
                _ => Err(self.unexpected("`0` or `1`")),
            },
            Tok::Coin => {
                self.advance();
                Ok(Term::Coin)
            }
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::If => {
                self.advance();
                let c = self.term()?;
                self.expect(Tok::Then)?;
                let t = self.term()?;
                self.expect(Tok::Else)?;
                let e = self.term()?;
                Ok(Term::ite(c, t, e))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn resolve(&mut self, name: &str) -> Result<Term, ParseError> {
        debug_assert!(!KEYWORDS.contains(&name));
        if let Some(pos) = self.bound.iter().rposition(|b| b == name) {
            return Ok(Term::Var(self.bound.len() - 1 - pos));
        }
        let depth = self.bound.len();
        let slot = match &mut self.scope {
            Scope::Closed => None,
            Scope::Fixed(names) => names.iter().position(|n| n == name),
            Scope::Open(names) => Some(match names.iter().position(|n| n == name) {
                Some(k) => k,
                None => {
                    names.push(name.into());
                    names.len() - 1
                }
            }),
        };
        match slot {
            Some(k) => Ok(Term::Var(depth + k)),
            None => Err(self.error_here(ParseErrorKind::Scope(name.into()))),
        }
    }
}
