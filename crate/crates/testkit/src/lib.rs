//! Random well-typed term generators for tests.
//!
//! Terms are built type-directed, so every generated term has the
//! requested type. Resource tracking keeps them inside the requested
//! discipline: under `Affine` a variable is handed to at most one
//! subterm, under `SubAffine` the two branches of an `if` may share what
//! the condition left over. Generation favours beta redexes and coins so
//! that the terms have something to reduce.

pub mod suites;

use lambcoin_core::{typecheck, Discipline, Rational, Term, Type, TypingContext};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Shape of a generator run.
#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub discipline: Discipline,
    /// Upper bound on the syntax-tree size of the generated term.
    pub max_size: usize,
    /// Emit `coin`. Off for deterministic terms.
    pub coins: bool,
}

impl Config {
    pub fn new(discipline: Discipline, max_size: usize) -> Self {
        Config {
            discipline,
            max_size,
            coins: true,
        }
    }
}

/// `𝔹 -> ... -> 𝔹` with up to `max_args` arguments.
pub fn first_order_type<R: Rng>(rng: &mut R, max_args: usize) -> Type {
    let n = rng.random_range(0..=max_args);
    Type::curried(std::iter::repeat_n(Type::Bool, n), Type::Bool)
}

/// A small type of order at most two, for argument positions.
pub fn small_type<R: Rng>(rng: &mut R) -> Type {
    match rng.random_range(0..6) {
        0..=2 => Type::Bool,
        3 | 4 => Type::arrow(Type::Bool, Type::Bool),
        _ => Type::curried([Type::Bool, Type::Bool], Type::Bool),
    }
}

/// Smallest closed term size inhabiting `ty`.
fn min_size(ty: &Type) -> usize {
    match ty {
        Type::Bool => 1,
        Type::Arrow(_, b) => 1 + min_size(b),
    }
}

struct Gen<'r, R> {
    rng: &'r mut R,
    cfg: Config,
    /// Types of variables by de Bruijn level.
    levels: Vec<Type>,
}

impl<R: Rng> Gen<'_, R> {
    fn index(&self, level: usize) -> usize {
        self.levels.len() - 1 - level
    }

    /// A term of type `ty` of size at most `budget` that only uses the
    /// levels in `avail`. Returns the levels it used.
    fn term(&mut self, ty: &Type, budget: usize, avail: &[usize]) -> (Term, Vec<usize>) {
        let budget = budget.max(min_size(ty));
        let mut choices: Vec<u8> = Vec::new();
        let atom_ok = matches!(ty, Type::Bool) || self.var_of(ty, avail).is_some();
        if atom_ok {
            choices.push(0);
        }
        if let Type::Arrow(..) = ty {
            choices.extend([1, 1, 1]);
        }
        if budget >= 3 && self.spine_candidates(ty, avail).iter().any(|_| true) {
            choices.extend([2, 2]);
        }
        if budget >= min_size(ty) + 3 {
            // Beta redex.
            choices.extend([3, 3, 3]);
        }
        if budget >= 2 * min_size(ty) + 2 {
            choices.extend([4, 4]);
        }
        if choices.is_empty() {
            choices.push(if matches!(ty, Type::Arrow(..)) { 1 } else { 0 });
        }
        match *choices.choose(self.rng).unwrap() {
            0 => self.atom(ty, avail),
            1 => {
                let Type::Arrow(a, b) = ty else {
                    unreachable!()
                };
                self.levels.push((**a).clone());
                let level = self.levels.len() - 1;
                let mut inner = avail.to_vec();
                inner.push(level);
                let (body, mut used) = self.term(b, budget - 1, &inner);
                self.levels.pop();
                used.retain(|&l| l != level);
                (Term::lam(body), used)
            }
            2 => self.spine(ty, budget, avail),
            3 => self.redex(ty, budget, avail),
            _ => self.conditional(ty, budget, avail),
        }
    }

    fn var_of(&mut self, ty: &Type, avail: &[usize]) -> Option<usize> {
        let vs: Vec<usize> = avail
            .iter()
            .copied()
            .filter(|&l| &self.levels[l] == ty)
            .collect();
        vs.choose(self.rng).copied()
    }

    fn atom(&mut self, ty: &Type, avail: &[usize]) -> (Term, Vec<usize>) {
        if let Some(l) = self.var_of(ty, avail) {
            if !matches!(ty, Type::Bool) || self.rng.random_bool(0.5) {
                return (Term::var(self.index(l)), vec![l]);
            }
        }
        let t = match self.rng.random_range(0..4) {
            0 if self.cfg.coins => Term::Coin,
            1 if self.cfg.coins => Term::Coin,
            0 | 2 => Term::Zero,
            _ => Term::One,
        };
        (t, vec![])
    }

    /// Variables `x : A1 -> ... -> An -> ty` with `n >= 1`.
    fn spine_candidates(&self, ty: &Type, avail: &[usize]) -> Vec<(usize, Vec<Type>)> {
        let mut out = Vec::new();
        for &l in avail {
            let mut cur = &self.levels[l];
            let mut args = Vec::new();
            while let Type::Arrow(a, b) = cur {
                args.push((**a).clone());
                cur = b;
                if cur == ty {
                    out.push((l, args.clone()));
                }
            }
        }
        out
    }

    fn take(&self, avail: &[usize], used: &[usize]) -> Vec<usize> {
        if self.cfg.discipline == Discipline::Simple {
            avail.to_vec()
        } else {
            avail
                .iter()
                .copied()
                .filter(|l| !used.contains(l))
                .collect()
        }
    }

    fn spine(&mut self, ty: &Type, budget: usize, avail: &[usize]) -> (Term, Vec<usize>) {
        let cands = self.spine_candidates(ty, avail);
        let (l, args) = cands.choose(self.rng).unwrap().clone();
        let mut used = vec![l];
        let mut rest = self.take(avail, &used);
        let mut t = Term::var(self.index(l));
        let mut left = budget.saturating_sub(1);
        for (i, a) in args.iter().enumerate() {
            let remaining: usize = args[i + 1..].iter().map(min_size).sum();
            let share = left
                .saturating_sub(remaining)
                .saturating_sub(1)
                .max(min_size(a));
            let share = self.rng.random_range(min_size(a)..=share.max(min_size(a)));
            let (arg, u) = self.term(a, share, &rest);
            left = left.saturating_sub(arg.size() + 1);
            rest = self.take(&rest, &u);
            used.extend(u);
            t = Term::app(t, arg);
        }
        (t, used)
    }

    fn redex(&mut self, ty: &Type, budget: usize, avail: &[usize]) -> (Term, Vec<usize>) {
        let a = if self.rng.random_bool(0.8) {
            Type::Bool
        } else {
            Type::arrow(Type::Bool, Type::Bool)
        };
        let inner = budget - 2;
        let top = inner.saturating_sub(min_size(&a)).max(min_size(ty));
        let body_budget = self.rng.random_range(min_size(ty)..=top);
        self.levels.push(a.clone());
        let level = self.levels.len() - 1;
        let mut scope = avail.to_vec();
        scope.push(level);
        let (body, mut used) = self.term(ty, body_budget, &scope);
        self.levels.pop();
        used.retain(|&l| l != level);
        let fun = Term::lam(body);
        let rest = self.take(avail, &used);
        let arg_budget = budget.saturating_sub(fun.size() + 1);
        let (arg, u) = self.term(&a, arg_budget, &rest);
        used.extend(u);
        (Term::app(fun, arg), used)
    }

    fn conditional(&mut self, ty: &Type, budget: usize, avail: &[usize]) -> (Term, Vec<usize>) {
        let branch_min = min_size(ty);
        let cond_budget = self
            .rng
            .random_range(1..=(budget - 1 - 2 * branch_min).clamp(1, 4));
        let (cond, mut used) = self.term(&Type::Bool, cond_budget, avail);
        let rest = self.take(avail, &used);
        let left = budget.saturating_sub(cond.size() + 1);
        let then_budget = self
            .rng
            .random_range(branch_min..=left.saturating_sub(branch_min).max(branch_min));
        let (then, u) = self.term(ty, then_budget, &rest);
        let else_avail = match self.cfg.discipline {
            Discipline::Affine => self.take(&rest, &u),
            _ => rest.clone(),
        };
        used.extend(u);
        let else_budget = budget.saturating_sub(cond.size() + then.size() + 1);
        let (els, u) = self.term(ty, else_budget, &else_avail);
        used.extend(u);
        (Term::ite(cond, then, els), used)
    }
}

/// A term of type `ty` in a context whose slot `k` has type `ctx[k]`.
/// The result fits `cfg.max_size` when the type allows it; callers that
/// need a hard bound should retry on oversize results.
pub fn open_term<R: Rng>(rng: &mut R, cfg: Config, ctx: &[Type], ty: &Type) -> Term {
    let levels: Vec<Type> = ctx.iter().rev().cloned().collect();
    let avail: Vec<usize> = (0..levels.len()).collect();
    let mut g = Gen { rng, cfg, levels };
    g.term(ty, cfg.max_size, &avail).0
}

/// A closed term of type `ty` within `cfg.max_size`.
pub fn closed_term<R: Rng>(rng: &mut R, cfg: Config, ty: &Type) -> Term {
    loop {
        let t = open_term(rng, cfg, &[], ty);
        if t.size() <= cfg.max_size {
            return t;
        }
    }
}

/// A closed term of a random first-order type, together with the type it
/// was generated at.
pub fn closed_program<R: Rng>(rng: &mut R, cfg: Config, max_args: usize) -> (Term, Type) {
    let ty = first_order_type(rng, max_args);
    (closed_term(rng, cfg, &ty), ty)
}

/// A closed sub-affine program `(\x. body) arg` of first-order type
/// where `arg` flips a coin and `body` uses `x` more than once, so that
/// reducing `arg` before or after the beta step gives different results.
pub fn duplicating_program<R: Rng>(rng: &mut R, max_size: usize, max_args: usize) -> (Term, Type) {
    let sub = |size| Config::new(Discipline::SubAffine, size);
    loop {
        let n = rng.random_range(1..=max_args.max(1));
        let ty = Type::curried(std::iter::repeat_n(Type::Bool, n), Type::Bool);
        let arg = if rng.random_bool(0.6) {
            Term::Coin
        } else {
            closed_term(rng, sub(3), &Type::Bool)
        };
        if arg.coin_count() == 0 || arg.size() + 3 > max_size {
            continue;
        }
        let body = open_term(rng, sub(max_size - 2 - arg.size()), &[Type::Bool], &ty);
        let t = Term::app(Term::lam(body.clone()), arg);
        if body.count_occurrences(0) >= 2
            && t.size() <= max_size
            && typecheck(&TypingContext::empty(), &t, Discipline::SubAffine).is_ok()
        {
            return (t, ty);
        }
    }
}

/// An open term in which context slot `x` occurs free exactly once,
/// typed in `ctx` under `cfg.discipline`.
pub fn single_occurrence_term<R: Rng>(
    rng: &mut R,
    cfg: Config,
    ctx: &[Type],
    ty: &Type,
    x: usize,
) -> Term {
    let tctx = named(ctx);
    loop {
        let t = open_term(rng, cfg, ctx, ty);
        if t.count_occurrences(x) == 1
            && t.size() <= cfg.max_size
            && typecheck(&tctx, &t, cfg.discipline).is_ok()
        {
            return t;
        }
    }
}

/// A typing context with names `v0, v1, ...` for the given slot types.
pub fn named(ctx: &[Type]) -> TypingContext {
    TypingContext::new(
        ctx.iter()
            .enumerate()
            .map(|(i, t)| (format!("v{i}"), t.clone()))
            .collect(),
    )
}

/// A random probability strictly between 0 and 1 with a small denominator.
pub fn probability<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.random_range(2..=8);
    Rational::new(rng.random_range(1..d), d)
}

/// An arbitrary, possibly ill-typed, term with free indices below
/// `depth`. Covers every constructor, including `⊕`.
pub fn raw_term<R: Rng>(rng: &mut R, depth: usize, budget: usize) -> Term {
    let pick = if budget <= 1 {
        rng.random_range(0..4)
    } else {
        rng.random_range(0..9)
    };
    match pick {
        0 if depth > 0 => Term::var(rng.random_range(0..depth)),
        0 | 1 => Term::Zero,
        2 => Term::One,
        3 => Term::Coin,
        4 | 5 => Term::lam(raw_term(rng, depth + 1, budget - 1)),
        6 | 7 => {
            let l = rng.random_range(1..budget.max(2));
            Term::app(
                raw_term(rng, depth, l),
                raw_term(rng, depth, budget.saturating_sub(l + 1).max(1)),
            )
        }
        _ if budget >= 4 && rng.random_bool(0.5) => {
            let b = (budget - 1) / 3;
            Term::ite(
                raw_term(rng, depth, b),
                raw_term(rng, depth, b),
                raw_term(rng, depth, b),
            )
        }
        _ => {
            let b = ((budget - 1) / 2).max(1);
            Term::oplus(
                probability(rng),
                raw_term(rng, depth, b),
                raw_term(rng, depth, b),
            )
        }
    }
}
