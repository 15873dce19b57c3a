use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::Term;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Top,
    OplusLeft,
    OplusRight,
    AppFun,
    AppArg,
}

/// Canonical rendering. Binders are named `x0`, `x1`, ... by nesting depth;
/// free context slot `k` is printed as `fk`.
pub fn pretty(t: &Term) -> String {
    let max = t.free_vars().last().map_or(0, |k| k + 1);
    let names: Vec<String> = (0..max).map(|k| format!("f{k}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    pretty_in(t, &names)
}

/// Rendering with `names[k]` for free context slot `k`. Slots without a
/// name fall back to `fk`.
pub fn pretty_in(t: &Term, names: &[&str]) -> String {
    let prefix = binder_prefix(names);
    let mut out = String::new();
    Printer {
        names,
        prefix,
        out: &mut out,
    }
    .term(t, 0, Slot::Top);
    out
}

fn binder_prefix(names: &[&str]) -> &'static str {
    const CANDIDATES: [&str; 5] = ["x", "v", "w", "z", "b_"];
    let clashes = |p: &str| {
        names.iter().any(|n| {
            n.strip_prefix(p)
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        })
    };
    CANDIDATES.into_iter().find(|p| !clashes(p)).unwrap_or("x")
}

struct Printer<'a> {
    names: &'a [&'a str],
    prefix: &'static str,
    out: &'a mut String,
}

impl Printer<'_> {
    fn term(&mut self, t: &Term, depth: usize, slot: Slot) {
        let parens = match t {
            Term::Var(_) | Term::One | Term::Zero | Term::Coin => false,
            Term::Lam(_) | Term::If(..) => slot != Slot::Top,
            Term::Oplus(..) => !matches!(slot, Slot::Top | Slot::OplusLeft),
            Term::App(..) => slot == Slot::AppArg,
        };
        if parens {
            self.out.push('(');
        }
        match t {
            Term::Var(i) if *i < depth => {
                let _ = write!(self.out, "{}{}", self.prefix, depth - 1 - i);
            }
            Term::Var(i) => match self.names.get(i - depth) {
                Some(name) => self.out.push_str(name),
                None => {
                    let _ = write!(self.out, "f{}", i - depth);
                }
            },
            Term::One => self.out.push('1'),
            Term::Zero => self.out.push('0'),
            Term::Coin => self.out.push_str("coin"),
            Term::Lam(body) => {
                let _ = write!(self.out, "\\{}{}. ", self.prefix, depth);
                self.term(body, depth + 1, Slot::Top);
            }
            Term::App(f, a) => {
                self.term(f, depth, Slot::AppFun);
                self.out.push(' ');
                self.term(a, depth, Slot::AppArg);
            }
            Term::If(c, th, el) => {
                self.out.push_str("if ");
                self.term(c, depth, Slot::Top);
                self.out.push_str(" then ");
                self.term(th, depth, Slot::Top);
                self.out.push_str(" else ");
                self.term(el, depth, Slot::Top);
            }
            Term::Oplus(p, l, r) => {
                self.term(l, depth, Slot::OplusLeft);
                let _ = write!(self.out, " +[{p}] ");
                self.term(r, depth, Slot::OplusRight);
            }
        }
        if parens {
            self.out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::CalculusVariant;
    use crate::syntax::{parse, parse_closed, parse_in, Rational};

    #[test]
    fn canonical_names() {
        assert_eq!(pretty(&Term::Coin), "coin");
        assert_eq!(pretty(&Term::lam(Term::Var(0))), "\\x0. x0");
        let dup = parse_closed("(\\x.\\y. y x x) coin", CalculusVariant::Plain).unwrap();
        assert_eq!(pretty(&dup), "(\\x0. \\x1. x1 x0 x0) coin");
    }

    #[test]
    fn parenthesization() {
        let v = CalculusVariant::Internalized;
        for src in [
            "\\y. y (0 +[1/2] 1) (0 +[1/2] 1)",
            "(\\x0. x0) +[1/3] (0 +[1/2] 1)",
            "(if 1 then 0 else 1) 0",
            "\\x0. if x0 then 0 else (\\x1. if x1 then 0 else 1) x0",
            "(0 +[1/2] 1) 0",
            "if \\x0. x0 then 0 else 1",
        ] {
            let t = parse_closed(src, v).unwrap();
            let printed = pretty(&t);
            assert_eq!(parse_closed(&printed, v).unwrap(), t, "{src} -> {printed}");
        }
        let t = parse_closed("0 +[1/2] 1 +[1/4] 0", v).unwrap();
        assert_eq!(pretty(&t), "0 +[1/2] 1 +[1/4] 0");
        let t = Term::oplus(
            Rational::half(),
            Term::Zero,
            Term::oplus(Rational::half(), Term::One, Term::Zero),
        );
        assert_eq!(pretty(&t), "0 +[1/2] (1 +[1/2] 0)");
    }

    #[test]
    fn open_terms() {
        let parsed = parse("\\y. y x x", CalculusVariant::Plain).unwrap();
        assert_eq!(pretty(&parsed.term), "\\x0. x0 f0 f0");
        let names: Vec<&str> = parsed.free.iter().map(String::as_str).collect();
        let shown = pretty_in(&parsed.term, &names);
        assert_eq!(shown, "\\x0. x0 x x");
        assert_eq!(
            parse_in(&shown, CalculusVariant::Plain, &names).unwrap(),
            parsed.term
        );
    }

    #[test]
    fn binder_prefix_avoids_context_names() {
        let t = Term::lam(Term::app(Term::Var(0), Term::Var(1)));
        assert_eq!(pretty_in(&t, &["x0"]), "\\v0. v0 x0");
    }
}
