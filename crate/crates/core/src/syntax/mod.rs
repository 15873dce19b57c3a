//! Terms, types, substitution and concrete syntax.
//!
//! Terms are nameless: a variable is a de Bruijn index counting the
//! binders between its occurrence and the binder it refers to. Indices
//! that reach past every enclosing binder refer to context slots, slot 0
//! being the innermost context entry. Two terms are alpha-equivalent
//! exactly when they are structurally equal.

mod parse;
mod pretty;
mod rational;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

pub use parse::{parse, parse_closed, parse_in, ParseError, ParseErrorKind, Parsed};
pub use pretty::{pretty, pretty_in};
pub use rational::{Rational, RationalParseError};

/// A term of the calculus, plus the `+[p]` constructor of the
/// internalized variant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    Lam(Box<Term>),
    App(Box<Term>, Box<Term>),
    One,
    Zero,
    If(Box<Term>, Box<Term>, Box<Term>),
    Coin,
    /// `left +[p] right`: `left` with probability `p`, `right` with `1 - p`.
    Oplus(Rational, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(index: usize) -> Term {
        Term::Var(index)
    }

    pub fn lam(body: Term) -> Term {
        Term::Lam(Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application `fun a1 ... an`.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn ite(cond: Term, then: Term, els: Term) -> Term {
        Term::If(Box::new(cond), Box::new(then), Box::new(els))
    }

    /// `left +[p] right`.
    ///
    /// # Panics
    ///
    /// Panics unless `0 < p < 1`.
    pub fn oplus(p: Rational, left: Term, right: Term) -> Term {
        assert!(
            p.is_proper_probability(),
            "oplus probability must lie in (0, 1)"
        );
        Term::Oplus(p, Box::new(left), Box::new(right))
    }

    pub fn bool(b: bool) -> Term {
        if b {
            Term::One
        } else {
            Term::Zero
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::One | Term::Zero | Term::Coin => 1,
            Term::Lam(b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::If(c, t, e) => 1 + c.size() + t.size() + e.size(),
            Term::Oplus(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Free context slots of the term.
    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_free(0, &mut out);
        out
    }

    fn collect_free(&self, depth: usize, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(i) => {
                if *i >= depth {
                    out.insert(i - depth);
                }
            }
            Term::Lam(b) => b.collect_free(depth + 1, out),
            Term::App(f, a) => {
                f.collect_free(depth, out);
                a.collect_free(depth, out);
            }
            Term::If(c, t, e) => {
                c.collect_free(depth, out);
                t.collect_free(depth, out);
                e.collect_free(depth, out);
            }
            Term::Oplus(_, l, r) => {
                l.collect_free(depth, out);
                r.collect_free(depth, out);
            }
            Term::One | Term::Zero | Term::Coin => {}
        }
    }

    /// Number of free occurrences of context slot `x`.
    pub fn count_occurrences(&self, x: usize) -> usize {
        fn go(t: &Term, x: usize) -> usize {
            match t {
                Term::Var(i) => usize::from(*i == x),
                Term::Lam(b) => go(b, x + 1),
                Term::App(f, a) => go(f, x) + go(a, x),
                Term::If(c, t, e) => go(c, x) + go(t, x) + go(e, x),
                Term::Oplus(_, l, r) => go(l, x) + go(r, x),
                Term::One | Term::Zero | Term::Coin => 0,
            }
        }
        go(self, x)
    }

    pub fn contains_oplus(&self) -> bool {
        match self {
            Term::Oplus(..) => true,
            Term::Lam(b) => b.contains_oplus(),
            Term::App(f, a) => f.contains_oplus() || a.contains_oplus(),
            Term::If(c, t, e) => c.contains_oplus() || t.contains_oplus() || e.contains_oplus(),
            Term::Var(_) | Term::One | Term::Zero | Term::Coin => false,
        }
    }

    pub fn coin_count(&self) -> usize {
        match self {
            Term::Coin => 1,
            Term::Lam(b) => b.coin_count(),
            Term::App(f, a) => f.coin_count() + a.coin_count(),
            Term::If(c, t, e) => c.coin_count() + t.coin_count() + e.coin_count(),
            Term::Oplus(_, l, r) => l.coin_count() + r.coin_count(),
            Term::Var(_) | Term::One | Term::Zero => 0,
        }
    }

    /// Adds `by` to every free index at or above `cutoff`.
    ///
    /// # Panics
    ///
    /// Panics if a negative shift would make an index negative.
    pub fn shift(&self, by: isize, cutoff: usize) -> Term {
        if by == 0 {
            return self.clone();
        }
        match self {
            Term::Var(i) if *i >= cutoff => {
                let shifted = (*i as isize) + by;
                assert!(shifted >= 0, "shift produced a negative index");
                Term::Var(shifted as usize)
            }
            Term::Var(i) => Term::Var(*i),
            Term::Lam(b) => Term::lam(b.shift(by, cutoff + 1)),
            Term::App(f, a) => Term::app(f.shift(by, cutoff), a.shift(by, cutoff)),
            Term::If(c, t, e) => Term::ite(
                c.shift(by, cutoff),
                t.shift(by, cutoff),
                e.shift(by, cutoff),
            ),
            Term::Oplus(p, l, r) => Term::Oplus(
                p.clone(),
                Box::new(l.shift(by, cutoff)),
                Box::new(r.shift(by, cutoff)),
            ),
            Term::One => Term::One,
            Term::Zero => Term::Zero,
            Term::Coin => Term::Coin,
        }
    }

    /// `self[r/x]` for context slot `x`, where `r` lives in the same context
    /// as `self`. The slot itself stays in the context; only its
    /// occurrences are replaced. Capture is avoided by shifting `r` under
    /// binders.
    pub fn substitute(&self, x: usize, r: &Term) -> Term {
        self.subst_at(x, r, 0)
    }

    fn subst_at(&self, x: usize, r: &Term, depth: usize) -> Term {
        match self {
            Term::Var(i) if *i == x + depth => r.shift(depth as isize, 0),
            Term::Var(i) => Term::Var(*i),
            Term::Lam(b) => Term::lam(b.subst_at(x, r, depth + 1)),
            Term::App(f, a) => Term::app(f.subst_at(x, r, depth), a.subst_at(x, r, depth)),
            Term::If(c, t, e) => Term::ite(
                c.subst_at(x, r, depth),
                t.subst_at(x, r, depth),
                e.subst_at(x, r, depth),
            ),
            Term::Oplus(p, l, rr) => Term::Oplus(
                p.clone(),
                Box::new(l.subst_at(x, r, depth)),
                Box::new(rr.subst_at(x, r, depth)),
            ),
            Term::One => Term::One,
            Term::Zero => Term::Zero,
            Term::Coin => Term::Coin,
        }
    }

    /// Beta instantiation: `self` is the body of an abstraction, `arg`
    /// lives outside it. Replaces index 0 by `arg` and removes the binder.
    pub fn instantiate(&self, arg: &Term) -> Term {
        self.substitute(0, &arg.shift(1, 0)).shift(-1, 0)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

/// Alpha-equivalence. Terms are nameless, so this is structural equality.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    t == u
}

/// Simple types: `𝔹` and arrows.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Bool,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(from: Type, to: Type) -> Type {
        Type::Arrow(Box::new(from), Box::new(to))
    }

    /// `a1 -> ... -> an -> result`.
    pub fn curried(args: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a, acc))
    }

    /// Splits `a1 -> ... -> an -> 𝔹` into `[a1, ..., an]`.
    pub fn arguments(&self) -> Vec<&Type> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Type::Arrow(a, b) = cur {
            out.push(a.as_ref());
            cur = b;
        }
        out
    }

    /// True when every argument is `𝔹`.
    pub fn is_first_order(&self) -> bool {
        self.arguments().iter().all(|a| **a == Type::Bool)
    }

    /// ASCII rendering accepted by the command line (`B->B`).
    pub fn ascii(&self) -> alloc::string::String {
        use alloc::format;
        match self {
            Type::Bool => "B".into(),
            Type::Arrow(a, b) => match **a {
                Type::Arrow(..) => format!("({})->{}", a.ascii(), b.ascii()),
                Type::Bool => format!("B->{}", b.ascii()),
            },
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => f.write_str("𝔹"),
            Type::Arrow(a, b) => match **a {
                Type::Arrow(..) => write!(f, "({a}) → {b}"),
                Type::Bool => write!(f, "{a} → {b}"),
            },
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
