//! One-step probabilistic reduction.
//!
//! A redex is a beta redex `(\x. t) r`, an if-redex `if 1 then t else u` /
//! `if 0 then t else u`, or `coin`. Reduction is allowed in every position:
//! under binders, in both arguments of an application, in all three parts
//! of an if-then-else and in both operands of `+[p]`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::syntax::{Rational, Term};

/// Which calculus is being rewritten.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum CalculusVariant {
    /// `coin` reduces to `1` and to `0` with probability 1/2 each.
    #[default]
    Plain,
    /// `coin` reduces with probability 1 to the term `0 +[1/2] 1`.
    Internalized,
}

/// Deterministic redex selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Leftmost-outermost.
    CallByName,
    /// Leftmost-innermost.
    CallByValue,
}

/// One child selector in a [`Position`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Fun,
    Arg,
    Body,
    Cond,
    Then,
    Else,
    OplusLeft,
    OplusRight,
}

impl Direction {
    fn name(self) -> &'static str {
        match self {
            Direction::Fun => "fun",
            Direction::Arg => "arg",
            Direction::Body => "body",
            Direction::Cond => "cond",
            Direction::Then => "then",
            Direction::Else => "else",
            Direction::OplusLeft => "left",
            Direction::OplusRight => "right",
        }
    }
}

/// A path from the root of a term to one of its subterms.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<Direction>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, d: Direction) -> Self {
        let mut p = self.0.clone();
        p.push(d);
        Position(p)
    }

    pub fn join(&self, rest: &Position) -> Self {
        let mut p = self.0.clone();
        p.extend_from_slice(&rest.0);
        Position(p)
    }

    /// True when `self` lies strictly below `other`.
    pub fn is_strictly_below(&self, other: &Position) -> bool {
        self.0.len() > other.0.len() && self.0.starts_with(&other.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(d.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Position {
    type Err = RewriteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "root" || s.is_empty() {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part {
                "fun" => Ok(Direction::Fun),
                "arg" => Ok(Direction::Arg),
                "body" => Ok(Direction::Body),
                "cond" => Ok(Direction::Cond),
                "then" => Ok(Direction::Then),
                "else" => Ok(Direction::Else),
                "left" => Ok(Direction::OplusLeft),
                "right" => Ok(Direction::OplusRight),
                _ => Err(RewriteError::BadPosition(String::from(s))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RewriteError {
    /// The position does not address a redex of the term.
    NotARedex(Position),
    BadPosition(String),
}

impl fmt::Display for RewriteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteError::NotARedex(p) => write!(f, "no redex at position {p}"),
            RewriteError::BadPosition(s) => write!(f, "malformed position `{s}`"),
        }
    }
}

impl core::error::Error for RewriteError {}

/// The probabilistic outcomes of firing one redex.
///
/// Probabilities are strictly positive and sum to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    outcomes: Vec<(Rational, Term)>,
}

impl StepOutcome {
    fn new(outcomes: Vec<(Rational, Term)>) -> Self {
        debug_assert!(!outcomes.is_empty());
        debug_assert!(outcomes.iter().all(|(p, _)| p.is_positive()));
        debug_assert!(outcomes.iter().map(|(p, _)| p).sum::<Rational>().is_one());
        StepOutcome { outcomes }
    }

    pub fn outcomes(&self) -> &[(Rational, Term)] {
        &self.outcomes
    }

    pub fn into_outcomes(self) -> Vec<(Rational, Term)> {
        self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// Head rule for `t` when `t` itself is a redex.
fn fire_head(t: &Term, variant: CalculusVariant) -> Option<Vec<(Rational, Term)>> {
    match t {
        Term::App(f, a) => match f.as_ref() {
            Term::Lam(body) => Some(vec![(Rational::one(), body.instantiate(a))]),
            _ => None,
        },
        Term::If(c, th, el) => match c.as_ref() {
            Term::One => Some(vec![(Rational::one(), th.as_ref().clone())]),
            Term::Zero => Some(vec![(Rational::one(), el.as_ref().clone())]),
            _ => None,
        },
        Term::Coin => Some(match variant {
            CalculusVariant::Plain => {
                vec![
                    (Rational::half(), Term::One),
                    (Rational::half(), Term::Zero),
                ]
            }
            CalculusVariant::Internalized => vec![(
                Rational::one(),
                Term::oplus(Rational::half(), Term::Zero, Term::One),
            )],
        }),
        _ => None,
    }
}

fn is_head_redex(t: &Term) -> bool {
    match t {
        Term::App(f, _) => matches!(f.as_ref(), Term::Lam(_)),
        Term::If(c, _, _) => matches!(c.as_ref(), Term::One | Term::Zero),
        Term::Coin => true,
        _ => false,
    }
}

fn children(t: &Term) -> Vec<(Direction, &Term)> {
    match t {
        Term::Lam(b) => vec![(Direction::Body, b)],
        Term::App(f, a) => vec![(Direction::Fun, f), (Direction::Arg, a)],
        Term::If(c, th, el) => {
            vec![
                (Direction::Cond, c),
                (Direction::Then, th),
                (Direction::Else, el),
            ]
        }
        Term::Oplus(_, l, r) => vec![(Direction::OplusLeft, l), (Direction::OplusRight, r)],
        Term::Var(_) | Term::One | Term::Zero | Term::Coin => Vec::new(),
    }
}

/// All redex positions in pre-order (leftmost-outermost first).
///
/// The set of positions is the same in both calculus variants; only the
/// outcome of a `coin` redex differs.
pub fn redexes(t: &Term) -> Vec<Position> {
    fn go(t: &Term, path: &mut Vec<Direction>, out: &mut Vec<Position>) {
        if is_head_redex(t) {
            out.push(Position(path.clone()));
        }
        for (d, c) in children(t) {
            path.push(d);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn is_normal(t: &Term) -> bool {
    if is_head_redex(t) {
        return false;
    }
    match t {
        Term::Lam(b) => is_normal(b),
        Term::App(f, a) => is_normal(f) && is_normal(a),
        Term::If(c, th, el) => is_normal(c) && is_normal(th) && is_normal(el),
        Term::Oplus(_, l, r) => is_normal(l) && is_normal(r),
        Term::Var(_) | Term::One | Term::Zero | Term::Coin => true,
    }
}

/// The subterm at `pos`, if the path exists.
pub fn subterm<'a>(t: &'a Term, pos: &Position) -> Option<&'a Term> {
    pos.0.iter().try_fold(t, |cur, d| {
        children(cur)
            .into_iter()
            .find(|(cd, _)| cd == d)
            .map(|(_, c)| c)
    })
}

/// Rebuilds `t` with the subterm at `path` replaced by `f(subterm)`.
fn replace_at(t: &Term, path: &[Direction], f: &mut dyn FnMut(&Term) -> Term) -> Option<Term> {
    let Some((d, rest)) = path.split_first() else {
        return Some(f(t));
    };
    Some(match (t, d) {
        (Term::Lam(b), Direction::Body) => Term::lam(replace_at(b, rest, f)?),
        (Term::App(g, a), Direction::Fun) => Term::app(replace_at(g, rest, f)?, a.as_ref().clone()),
        (Term::App(g, a), Direction::Arg) => Term::app(g.as_ref().clone(), replace_at(a, rest, f)?),
        (Term::If(c, th, el), Direction::Cond) => Term::ite(
            replace_at(c, rest, f)?,
            th.as_ref().clone(),
            el.as_ref().clone(),
        ),
        (Term::If(c, th, el), Direction::Then) => Term::ite(
            c.as_ref().clone(),
            replace_at(th, rest, f)?,
            el.as_ref().clone(),
        ),
        (Term::If(c, th, el), Direction::Else) => Term::ite(
            c.as_ref().clone(),
            th.as_ref().clone(),
            replace_at(el, rest, f)?,
        ),
        (Term::Oplus(p, l, r), Direction::OplusLeft) => Term::Oplus(
            p.clone(),
            alloc::boxed::Box::new(replace_at(l, rest, f)?),
            r.clone(),
        ),
        (Term::Oplus(p, l, r), Direction::OplusRight) => Term::Oplus(
            p.clone(),
            l.clone(),
            alloc::boxed::Box::new(replace_at(r, rest, f)?),
        ),
        _ => return None,
    })
}

/// Fires the redex at `pos` and embeds each outcome back into `t`.
pub fn step_at(
    t: &Term,
    pos: &Position,
    variant: CalculusVariant,
) -> Result<StepOutcome, RewriteError> {
    let not_a_redex = || RewriteError::NotARedex(pos.clone());
    let head = subterm(t, pos).ok_or_else(not_a_redex)?;
    let fired = fire_head(head, variant).ok_or_else(not_a_redex)?;
    let outcomes = fired
        .into_iter()
        .map(|(p, r)| {
            let embedded = replace_at(t, &pos.0, &mut |_| r.clone()).ok_or_else(not_a_redex)?;
            Ok((p, embedded))
        })
        .collect::<Result<Vec<_>, RewriteError>>()?;
    Ok(StepOutcome::new(outcomes))
}

/// The redex a deterministic strategy fires next, or `None` on normal forms.
///
/// Both strategies reduce under binders and inside if-branches, so their
/// normal forms are exactly the normal forms of the full relation.
pub fn select_redex(t: &Term, strategy: Strategy) -> Option<Position> {
    let all = redexes(t);
    match strategy {
        Strategy::CallByName => all.into_iter().next(),
        Strategy::CallByValue => all
            .iter()
            .find(|p| !all.iter().any(|q| q.is_strictly_below(p)))
            .cloned(),
    }
}

/// Positions where a `+[p]` term blocks a destructor: an application
/// whose function is `+[p]`, or an if-then-else whose condition is. These
/// terms have no rule and stay as normal forms.
pub fn stuck_oplus(t: &Term) -> Vec<Position> {
    fn go(t: &Term, path: &mut Vec<Direction>, out: &mut Vec<Position>) {
        let stuck = match t {
            Term::App(f, _) => matches!(f.as_ref(), Term::Oplus(..)),
            Term::If(c, _, _) => matches!(c.as_ref(), Term::Oplus(..)),
            _ => false,
        };
        if stuck {
            out.push(Position(path.clone()));
        }
        for (d, c) in children(t) {
            path.push(d);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}
