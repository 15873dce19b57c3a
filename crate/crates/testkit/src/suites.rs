//! Property suites shared by the unit-level property tests and the
//! acceptance target. Each suite runs a number of generated instances and
//! stops at the first counterexample.

use std::fmt;

use lambcoin_core::{
    check_computational_confluence, check_probabilistic_confluence, comp_equiv, dist_eq, is_normal,
    redexes, step_at, subterm, typecheck, CalculusVariant, Direction, Discipline, Distribution,
    EquivOptions, Position, Term, Type, TypingContext,
};
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::{
    closed_program, closed_term, duplicating_program, named, open_term, raw_term, small_type,
    Config,
};

/// Summary of a suite run.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub instances: usize,
    /// Extra counters, e.g. instances per redex kind.
    pub notes: Vec<(String, usize)>,
    pub counterexample: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    fn note(&mut self, key: &str) {
        match self.notes.iter_mut().find(|(k, _)| k == key) {
            Some((_, n)) => *n += 1,
            None => self.notes.push((key.to_string(), 1)),
        }
    }

    fn fail(mut self, msg: String) -> Self {
        self.counterexample = Some(msg);
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} instances", self.instances)?;
        for (k, n) in &self.notes {
            write!(f, ", {k}={n}")?;
        }
        if let Some(c) = &self.counterexample {
            write!(f, "; counterexample: {c}")?;
        }
        Ok(())
    }
}

fn random_ctx<R: Rng>(rng: &mut R, len: usize) -> Vec<Type> {
    (0..len).map(|_| small_type(rng)).collect()
}

/// `t[q/y][r/x] = t[r/x][q[r/x]/y]` whenever `x != y` and `y ∉ FV(r)`.
pub fn substitution_commutes<R: Rng>(rng: &mut R, n: usize) -> Report {
    let mut report = Report::default();
    while report.instances < n {
        let depth = rng.random_range(2..=4);
        let x = rng.random_range(0..depth);
        let y = (x + rng.random_range(1..depth)) % depth;
        let sizes = [
            rng.random_range(1..=12),
            rng.random_range(1..=6),
            rng.random_range(1..=6),
        ];
        let t = raw_term(rng, depth, sizes[0]);
        let q = raw_term(rng, depth, sizes[1]);
        let r = raw_term(rng, depth, sizes[2]);
        if r.free_vars().contains(&y) {
            continue;
        }
        report.instances += 1;
        let lhs = t.substitute(y, &q).substitute(x, &r);
        let rhs = t.substitute(x, &r).substitute(y, &q.substitute(x, &r));
        if lhs != rhs {
            return report.fail(format!("t={t} q={q} r={r} x=f{x} y=f{y}: {lhs} vs {rhs}"));
        }
    }
    report
}

fn redex_kind(t: &Term, pos: &Position) -> &'static str {
    match subterm(t, pos) {
        Some(Term::App(..)) => "beta",
        Some(Term::If(..)) => "if",
        _ => "coin",
    }
}

/// A step of `t` at `pos` yields `[(p_i, t_i)]` exactly when the step of
/// `t[r/x]` at `pos` yields `[(p_i, t_i[r/x])]`.
pub fn step_commutes_with_substitution<R: Rng>(rng: &mut R, n: usize) -> Report {
    let kinds = ["beta", "if", "coin"];
    let mut report = Report::default();
    let mut attempts = 0usize;
    while report.instances < n {
        attempts += 1;
        let want = kinds[report.instances % 3];
        let len = rng.random_range(1..=3);
        let ctx = random_ctx(rng, len);
        let cfg = Config::new(Discipline::Simple, 12);
        let ty = small_type(rng);
        let t = open_term(rng, cfg, &ctx, &ty);
        let candidates: Vec<Position> = redexes(&t)
            .into_iter()
            .filter(|p| redex_kind(&t, p) == want)
            .collect();
        let Some(pos) = candidates.choose(rng).cloned() else {
            if attempts > 1000 * n.max(1) {
                return report.fail(format!("could not generate a {want} redex"));
            }
            continue;
        };
        let x = rng.random_range(0..ctx.len());
        let r = open_term(rng, Config::new(Discipline::Simple, 6), &ctx, &ctx[x]);
        let variant = if rng.random_bool(0.5) {
            CalculusVariant::Plain
        } else {
            CalculusVariant::Internalized
        };
        report.instances += 1;
        report.note(want);
        let expected: Vec<(lambcoin_core::Rational, Term)> = step_at(&t, &pos, variant)
            .expect("listed redex fires")
            .into_outcomes()
            .into_iter()
            .map(|(p, ti)| (p, ti.substitute(x, &r)))
            .collect();
        let image = t.substitute(x, &r);
        match step_at(&image, &pos, variant) {
            Ok(out) if out.outcomes() == expected.as_slice() => {}
            other => {
                return report.fail(format!("t={t} r={r} x=f{x} at {pos}: got {other:?}"));
            }
        }
    }
    report
}

/// Position of the single free occurrence of slot `x` in `t`.
pub fn occurrence(t: &Term, x: usize) -> Option<Position> {
    fn go(t: &Term, x: usize, path: &mut Vec<Direction>) -> Option<Position> {
        let child = |d: Direction, c: &Term, x: usize, path: &mut Vec<Direction>| {
            path.push(d);
            let r = go(c, x, path);
            path.pop();
            r
        };
        match t {
            Term::Var(i) if *i == x => Some(Position(path.clone())),
            Term::Var(_) | Term::One | Term::Zero | Term::Coin => None,
            Term::Lam(b) => child(Direction::Body, b, x + 1, path),
            Term::App(f, a) => {
                child(Direction::Fun, f, x, path).or_else(|| child(Direction::Arg, a, x, path))
            }
            Term::If(c, u, v) => child(Direction::Cond, c, x, path)
                .or_else(|| child(Direction::Then, u, x, path))
                .or_else(|| child(Direction::Else, v, x, path)),
            Term::Oplus(_, l, r) => child(Direction::OplusLeft, l, x, path)
                .or_else(|| child(Direction::OplusRight, r, x, path)),
        }
    }
    go(t, x, &mut Vec::new())
}

/// For affine `t` with exactly one free `x` and `r →p s`, the step of
/// `t[r/x]` at the image of the redex gives `t[s/x]` with the same
/// probabilities. With no free `x` the substitution is the identity.
pub fn affine_substitution<R: Rng>(rng: &mut R, n: usize) -> Report {
    let mut report = Report::default();
    while report.instances < n {
        let len = rng.random_range(1..=3);
        let ctx = random_ctx(rng, len);
        let x = rng.random_range(0..ctx.len());
        let cfg = Config::new(Discipline::Affine, 10);
        let ty = small_type(rng);
        let r = open_term(rng, Config::new(Discipline::Affine, 8), &ctx, &ctx[x]);
        let Some(rpos) = redexes(&r).choose(rng).cloned() else {
            continue;
        };
        let t = open_term(rng, cfg, &ctx, &ty);
        let tctx = named(&ctx);
        if typecheck(&tctx, &t, Discipline::Affine).is_err() {
            return report.fail(format!("generator produced non-affine {t}"));
        }
        let variant = if rng.random_bool(0.5) {
            CalculusVariant::Plain
        } else {
            CalculusVariant::Internalized
        };
        let steps = step_at(&r, &rpos, variant)
            .expect("listed redex fires")
            .into_outcomes();
        match t.count_occurrences(x) {
            0 => {
                report.note("zero-occurrence");
                for (_, s) in &steps {
                    if t.substitute(x, &r) != t.substitute(x, s) {
                        return report.fail(format!("t={t} changes under f{x} substitution"));
                    }
                }
            }
            1 => {
                report.instances += 1;
                let occ = occurrence(&t, x).expect("one occurrence");
                let image = t.substitute(x, &r);
                let expected: Vec<_> = steps
                    .iter()
                    .map(|(p, s)| (p.clone(), t.substitute(x, s)))
                    .collect();
                match step_at(&image, &occ.join(&rpos), variant) {
                    Ok(out) if out.outcomes() == expected.as_slice() => {}
                    other => {
                        return report.fail(format!("t={t} r={r} x=f{x} at {rpos}: got {other:?}"));
                    }
                }
            }
            _ => return report.fail(format!("affine {t} uses f{x} twice")),
        }
    }
    report
}

/// The six overlaps between a root redex and a redex strictly inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalPair {
    /// `if 1 then r else s` against a step in `r`.
    IfOneThen,
    /// `if 1 then s else r` against a step in `r`.
    IfOneElse,
    /// `if 0 then s else r` against a step in `r`.
    IfZeroElse,
    /// `if 0 then r else s` against a step in `r`.
    IfZeroThen,
    /// `(\x. t) r` against a step in `t`.
    BetaBody,
    /// `(\x. t) r` against a step in `r`.
    BetaArg,
}

impl CriticalPair {
    pub const ALL: [CriticalPair; 6] = [
        CriticalPair::IfOneThen,
        CriticalPair::IfOneElse,
        CriticalPair::IfZeroElse,
        CriticalPair::IfZeroThen,
        CriticalPair::BetaBody,
        CriticalPair::BetaArg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriticalPair::IfOneThen => "if 1 / then-step",
            CriticalPair::IfOneElse => "if 1 / else-step",
            CriticalPair::IfZeroElse => "if 0 / else-step",
            CriticalPair::IfZeroThen => "if 0 / then-step",
            CriticalPair::BetaBody => "beta / body-step",
            CriticalPair::BetaArg => "beta / argument-step",
        }
    }
}

/// Fires the redex at `pos` in every support term.
fn step_all(d: &Distribution, pos: &Position) -> Distribution {
    d.lift_step(|_| Some(pos.clone()), CalculusVariant::Plain)
        .expect("redex present")
}

/// A sub-affine open term with at least one redex.
fn reducible<R: Rng>(rng: &mut R, ctx: &[Type], ty: &Type, size: usize) -> (Term, Position) {
    loop {
        let t = open_term(rng, Config::new(Discipline::SubAffine, size), ctx, ty);
        if let Some(p) = redexes(&t).choose(rng) {
            return (t, p.clone());
        }
    }
}

/// Instantiates one critical-pair schema `n` times and checks that the
/// two completions agree: syntactically for the first five, up to
/// computational equivalence for the argument step.
pub fn critical_pair<R: Rng>(
    rng: &mut R,
    pair: CriticalPair,
    n: usize,
    options: &EquivOptions,
) -> Report {
    let mut report = Report::default();
    let root = Position::root();
    while report.instances < n {
        let len = rng.random_range(0..=2);
        let ctx = random_ctx(rng, len);
        let tctx = named(&ctx);
        let ty = if pair == CriticalPair::BetaArg {
            crate::first_order_type(rng, 2)
        } else {
            small_type(rng)
        };
        let cfg = Config::new(Discipline::SubAffine, 8);
        let (term, inner, completions_equal) = match pair {
            CriticalPair::IfOneThen
            | CriticalPair::IfOneElse
            | CriticalPair::IfZeroElse
            | CriticalPair::IfZeroThen => {
                let (r, rpos) = reducible(rng, &ctx, &ty, 8);
                let s = open_term(rng, cfg, &ctx, &ty);
                let (c, r_first) = match pair {
                    CriticalPair::IfOneThen => (Term::One, true),
                    CriticalPair::IfOneElse => (Term::One, false),
                    CriticalPair::IfZeroElse => (Term::Zero, false),
                    _ => (Term::Zero, true),
                };
                if r_first {
                    (
                        Term::ite(c, r, s),
                        Position::root().child(Direction::Then).join(&rpos),
                        true,
                    )
                } else {
                    (
                        Term::ite(c, s, r),
                        Position::root().child(Direction::Else).join(&rpos),
                        true,
                    )
                }
            }
            CriticalPair::BetaBody => {
                let a = small_type(rng);
                let mut inner_ctx = vec![a.clone()];
                inner_ctx.extend(ctx.iter().cloned());
                let (body, bpos) = reducible(rng, &inner_ctx, &ty, 8);
                let arg = open_term(rng, Config::new(Discipline::SubAffine, 5), &ctx, &a);
                let pos = Position::root()
                    .child(Direction::Fun)
                    .child(Direction::Body)
                    .join(&bpos);
                (Term::app(Term::lam(body), arg), pos, true)
            }
            CriticalPair::BetaArg => {
                let a = if rng.random_bool(0.8) {
                    Type::Bool
                } else {
                    Type::arrow(Type::Bool, Type::Bool)
                };
                let body = open_term(
                    rng,
                    Config::new(Discipline::SubAffine, 8),
                    std::slice::from_ref(&a),
                    &ty,
                );
                let (arg, apos) = reducible(rng, &[], &a, 5);
                let pos = Position::root().child(Direction::Arg).join(&apos);
                (Term::app(Term::lam(body), arg), pos, false)
            }
        };
        if typecheck(&tctx, &term, Discipline::SubAffine).is_err() {
            continue;
        }
        report.instances += 1;
        let start = Distribution::dirac(term.clone());
        // Inner step first, then the root redex in every outcome.
        let left = step_all(&step_all(&start, &inner), &root);
        let right = step_all(&start, &root);
        if completions_equal {
            // The root step leaves the inner redex at the same position
            // relative to the contractum.
            let residual = match pair {
                CriticalPair::BetaBody => Position(inner.0[2..].to_vec()),
                _ => Position(inner.0[1..].to_vec()),
            };
            let right = match pair {
                CriticalPair::IfOneElse | CriticalPair::IfZeroThen => right,
                _ => step_all(&right, &residual),
            };
            if !dist_eq(&left, &right) {
                return report.fail(format!("{term}: {left} vs {right}"));
            }
        } else {
            match comp_equiv(&left, &right, &ty, options) {
                Ok(v) if v.equivalent => {}
                Ok(v) => return report.fail(format!("{term}: {left} vs {right}\n{v}")),
                Err(e) => return report.fail(format!("{term}: {e}")),
            }
            if left != right {
                report.note("syntactically-distinct");
            }
        }
    }
    report
}

/// Every closed sub-affine term of first-order type reaches only
/// computationally equivalent distributions. Every other instance
/// duplicates a coin-bearing argument.
pub fn computational_confluence<R: Rng>(rng: &mut R, n: usize, options: &EquivOptions) -> Report {
    let mut report = Report::default();
    let cfg = Config::new(Discipline::SubAffine, 10);
    while report.instances < n {
        let (t, _) = if report.instances % 2 == 0 {
            closed_program(rng, cfg, 2)
        } else {
            duplicating_program(rng, 10, 2)
        };
        report.instances += 1;
        match check_computational_confluence(&t, options) {
            Ok(r) if r.confluent => {
                if r.distributions.len() > 1 {
                    report.note("several-endpoints");
                }
            }
            Ok(r) => return report.fail(format!("{t}\n{r}")),
            Err(e) => return report.fail(format!("{t}: {e}")),
        }
    }
    report
}

/// Every closed affine term reaches a single normal-form distribution.
pub fn affine_confluence<R: Rng>(rng: &mut R, n: usize, fuel: u64) -> Report {
    let mut report = Report::default();
    let cfg = Config::new(Discipline::Affine, 10);
    while report.instances < n {
        let ty = if rng.random_bool(0.8) {
            crate::first_order_type(rng, 2)
        } else {
            small_type(rng)
        };
        let t = closed_term(rng, cfg, &ty);
        if typecheck(&TypingContext::empty(), &t, Discipline::Affine).is_err() {
            return report.fail(format!("generator produced non-affine {t}"));
        }
        report.instances += 1;
        if !is_normal(&t) {
            report.note("reducible");
        }
        match check_probabilistic_confluence(&t, CalculusVariant::Plain, fuel) {
            Ok(r) if r.confluent => {}
            Ok(r) => return report.fail(format!("{t}\n{r}")),
            Err(e) => return report.fail(format!("{t}: {e}")),
        }
    }
    report
}
