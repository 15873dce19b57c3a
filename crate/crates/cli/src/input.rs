//! Reading terms, types and `.dist` files.

use std::fmt;
use std::fs;
use std::io::{self, Read};
use std::path::Path;

use lambcoin_core::{
    parse_closed, CalculusVariant, Distribution, ParseError, Rational, Term, Type,
};

#[derive(Debug)]
pub enum InputError {
    Io(String, io::Error),
    Parse(ParseError),
    Type(String),
    Dist(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io(src, e) => write!(f, "cannot read {src}: {e}"),
            InputError::Parse(e) => write!(f, "{e}"),
            InputError::Type(msg) => write!(f, "invalid type: {msg}"),
            InputError::Dist(msg) => write!(f, "invalid distribution: {msg}"),
        }
    }
}

impl std::error::Error for InputError {}

fn read_stdin() -> Result<String, InputError> {
    let mut s = String::new();
    io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| InputError::Io("standard input".into(), e))?;
    Ok(s)
}

fn read_file(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::Io(path.display().to_string(), e))
}

/// Source text of a term: a literal, `-` for stdin, or a file.
pub fn term_text(literal: Option<&str>, file: Option<&Path>) -> Result<String, InputError> {
    match (literal, file) {
        (_, Some(path)) => read_file(path),
        (Some("-"), None) => read_stdin(),
        (Some(text), None) => Ok(text.to_string()),
        (None, None) => Err(InputError::Io(
            "input".into(),
            io::ErrorKind::NotFound.into(),
        )),
    }
}

pub fn closed_term(text: &str, variant: CalculusVariant) -> Result<Term, InputError> {
    parse_closed(text, variant).map_err(InputError::Parse)
}

/// Parses `B`, `->` (right-associative) and parentheses. `𝔹` and `→`
/// are accepted too.
pub fn parse_type(text: &str) -> Result<Type, InputError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Tok {
        B,
        Arrow,
        Open,
        Close,
    }
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            'B' | '𝔹' => toks.push(Tok::B),
            '→' => toks.push(Tok::Arrow),
            '-' if chars.next_if_eq(&'>').is_some() => toks.push(Tok::Arrow),
            '(' => toks.push(Tok::Open),
            ')' => toks.push(Tok::Close),
            other => {
                return Err(InputError::Type(format!(
                    "unexpected `{other}` in `{text}`"
                )))
            }
        }
    }

    fn arrow(toks: &[Tok], i: &mut usize) -> Result<Type, String> {
        let from = atom(toks, i)?;
        if toks.get(*i) == Some(&Tok::Arrow) {
            *i += 1;
            Ok(Type::arrow(from, arrow(toks, i)?))
        } else {
            Ok(from)
        }
    }

    fn atom(toks: &[Tok], i: &mut usize) -> Result<Type, String> {
        match toks.get(*i) {
            Some(Tok::B) => {
                *i += 1;
                Ok(Type::Bool)
            }
            Some(Tok::Open) => {
                *i += 1;
                let t = arrow(toks, i)?;
                if toks.get(*i) != Some(&Tok::Close) {
                    return Err("missing `)`".into());
                }
                *i += 1;
                Ok(t)
            }
            _ => Err("expected `B` or `(`".into()),
        }
    }

    let mut i = 0;
    let ty = arrow(&toks, &mut i).map_err(|e| InputError::Type(format!("{e} in `{text}`")))?;
    if i != toks.len() {
        return Err(InputError::Type(format!("trailing input in `{text}`")));
    }
    Ok(ty)
}

/// Parses the canonical distribution text `{ p: term ; ... }`.
pub fn parse_distribution(
    text: &str,
    variant: CalculusVariant,
) -> Result<Distribution, InputError> {
    let body = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| InputError::Dist("expected `{ p: term ; ... }`".into()))?;
    let mut pairs = Vec::new();
    for entry in body.split(';') {
        let (p, t) = entry
            .split_once(':')
            .ok_or_else(|| InputError::Dist(format!("entry `{}` lacks `:`", entry.trim())))?;
        let p: Rational = p
            .trim()
            .parse()
            .map_err(|e| InputError::Dist(format!("probability `{}`: {e}", p.trim())))?;
        pairs.push((p, closed_term(t.trim(), variant)?));
    }
    Distribution::from_pairs(pairs).map_err(|e| InputError::Dist(e.to_string()))
}

/// A distribution argument: a file, `-` for stdin, or literal text.
pub fn distribution_arg(arg: &str, variant: CalculusVariant) -> Result<Distribution, InputError> {
    let text = if arg == "-" {
        read_stdin()?
    } else if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_file(Path::new(arg))?
    };
    parse_distribution(&text, variant)
}
