//! Type checking under the simple, affine and sub-affine disciplines.
//!
//! The calculus carries no type annotations, so types are found by
//! first-order unification. All three disciplines share the same typing
//! rules; affine and sub-affine additionally restrict how hypotheses may
//! be shared between sibling premises:
//!
//! | rule       | simple | affine                  | sub-affine                     |
//! |------------|--------|-------------------------|--------------------------------|
//! | `t r`      | shared | `t`, `r` disjoint       | `t`, `r` disjoint              |
//! | `if c u v` | shared | `c`, `u`, `v` disjoint  | `c` disjoint from `u` and `v`  |
//! | `u +[p] v` | shared | shared                  | shared                         |
//!
//! Weakening is built into the axioms, so a sub-derivation consumes a
//! hypothesis exactly when the variable occurs free in its subterm. The
//! disjointness conditions are therefore checked on free-variable sets.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rewrite::{Direction, Position};
use crate::syntax::{pretty_in, Term, Type};

/// Sharing discipline for hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Discipline {
    Simple,
    Affine,
    SubAffine,
}

/// Types of the free context slots of a term; entry `k` is slot `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingContext {
    entries: Vec<(String, Type)>,
}

impl TypingContext {
    pub fn empty() -> Self {
        TypingContext::default()
    }

    /// `entries[k]` names and types context slot `k`.
    pub fn new(entries: Vec<(String, Type)>) -> Self {
        TypingContext { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, slot: usize) -> Option<&(String, Type)> {
        self.entries.get(slot)
    }
}

/// A simple type that may contain type variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeScheme {
    Var(u32),
    Bool,
    Arrow(Box<TypeScheme>, Box<TypeScheme>),
}

impl TypeScheme {
    pub fn arrow(a: TypeScheme, b: TypeScheme) -> Self {
        TypeScheme::Arrow(Box::new(a), Box::new(b))
    }

    /// Instantiates every type variable at `𝔹`.
    pub fn ground(&self) -> Type {
        match self {
            TypeScheme::Var(_) | TypeScheme::Bool => Type::Bool,
            TypeScheme::Arrow(a, b) => Type::arrow(a.ground(), b.ground()),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            TypeScheme::Var(_) => false,
            TypeScheme::Bool => true,
            TypeScheme::Arrow(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    /// Renumbers variables `0, 1, ...` by first occurrence.
    fn canonical(&self) -> TypeScheme {
        fn go(t: &TypeScheme, map: &mut BTreeMap<u32, u32>) -> TypeScheme {
            match t {
                TypeScheme::Var(v) => {
                    let next = map.len() as u32;
                    TypeScheme::Var(*map.entry(*v).or_insert(next))
                }
                TypeScheme::Bool => TypeScheme::Bool,
                TypeScheme::Arrow(a, b) => {
                    let a = go(a, map);
                    TypeScheme::arrow(a, go(b, map))
                }
            }
        }
        go(self, &mut BTreeMap::new())
    }
}

impl From<&Type> for TypeScheme {
    fn from(t: &Type) -> Self {
        match t {
            Type::Bool => TypeScheme::Bool,
            Type::Arrow(a, b) => TypeScheme::arrow(a.as_ref().into(), b.as_ref().into()),
        }
    }
}

impl fmt::Display for TypeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const GREEK: [&str; 8] = ["α", "β", "γ", "δ", "ε", "ζ", "η", "θ"];
        match self {
            TypeScheme::Var(v) => match GREEK.get(*v as usize) {
                Some(g) => f.write_str(g),
                None => write!(f, "α{v}"),
            },
            TypeScheme::Bool => f.write_str("𝔹"),
            TypeScheme::Arrow(a, b) => match **a {
                TypeScheme::Arrow(..) => write!(f, "({a}) → {b}"),
                _ => write!(f, "{a} → {b}"),
            },
        }
    }
}

impl fmt::Debug for TypeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Typing rule labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Ax,
    ArrowIntro,
    ArrowElim,
    Ax0,
    Ax1,
    If,
    IfS,
    AxCoin,
    Oplus,
}

impl Rule {
    pub fn label(self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::ArrowIntro => "→i",
            Rule::ArrowElim => "→e",
            Rule::Ax0 => "ax₀",
            Rule::Ax1 => "ax₁",
            Rule::If => "if",
            Rule::IfS => "if_s",
            Rule::AxCoin => "ax_coin",
            Rule::Oplus => "oplus",
        }
    }

    fn of(t: &Term, d: Discipline) -> Rule {
        match t {
            Term::Var(_) => Rule::Ax,
            Term::Lam(_) => Rule::ArrowIntro,
            Term::App(..) => Rule::ArrowElim,
            Term::Zero => Rule::Ax0,
            Term::One => Rule::Ax1,
            Term::If(..) if d == Discipline::SubAffine => Rule::IfS,
            Term::If(..) => Rule::If,
            Term::Coin => Rule::AxCoin,
            Term::Oplus(..) => Rule::Oplus,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundVariable {
        slot: usize,
    },
    TypeMismatch {
        expected: TypeScheme,
        actual: TypeScheme,
    },
    NonBoolCondition {
        actual: TypeScheme,
    },
    NonFunctionApplied {
        actual: TypeScheme,
    },
    /// `variable` is used in two sibling premises that must be disjoint.
    AffinityViolation {
        variable: String,
    },
    OccursCheck {
        variable: TypeScheme,
        ty: TypeScheme,
    },
    UnificationFailure {
        left: TypeScheme,
        right: TypeScheme,
    },
}

impl TypeErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable { .. } => "UnboundVariable",
            TypeErrorKind::TypeMismatch { .. } => "TypeMismatch",
            TypeErrorKind::NonBoolCondition { .. } => "NonBoolCondition",
            TypeErrorKind::NonFunctionApplied { .. } => "NonFunctionApplied",
            TypeErrorKind::AffinityViolation { .. } => "AffinityViolation",
            TypeErrorKind::OccursCheck { .. } => "OccursCheck",
            TypeErrorKind::UnificationFailure { .. } => "UnificationFailure",
        }
    }
}

/// A typing failure: what went wrong, under which rule, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub rule: Rule,
    pub path: Position,
    pub subterm: Term,
    /// Display names of the free slots of `subterm`, innermost first:
    /// enclosing binders as `x{level}`, then the typing context.
    pub scope: Vec<String>,
}

impl TypeError {
    fn new(
        kind: TypeErrorKind,
        rule: Rule,
        ctx: &TypingContext,
        t: &Term,
        path: &[Direction],
    ) -> Self {
        let depth = path.iter().filter(|d| **d == Direction::Body).count();
        let mut scope: Vec<String> = (0..depth).rev().map(|l| alloc::format!("x{l}")).collect();
        scope.extend(ctx.entries.iter().map(|(n, _)| n.clone()));
        TypeError {
            kind,
            rule,
            path: Position(path.to_vec()),
            subterm: t.clone(),
            scope,
        }
    }

    /// The offending subterm, printed with the names in scope.
    pub fn subterm_text(&self) -> String {
        let names: Vec<&str> = self.scope.iter().map(String::as_str).collect();
        pretty_in(&self.subterm, &names)
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (rule {}, at {}",
            self.kind.name(),
            self.rule,
            self.path
        )?;
        write!(f, ", in `{}`): ", self.subterm_text())?;
        match &self.kind {
            TypeErrorKind::UnboundVariable { slot } => write!(f, "context slot {slot} has no type"),
            TypeErrorKind::TypeMismatch { expected, actual } => {
                write!(f, "expected {expected}, found {actual}")
            }
            TypeErrorKind::NonBoolCondition { actual } => {
                write!(f, "condition has type {actual}, expected 𝔹")
            }
            TypeErrorKind::NonFunctionApplied { actual } => {
                write!(f, "applied term has type {actual}, which is not a function")
            }
            TypeErrorKind::AffinityViolation { variable } => {
                write!(
                    f,
                    "variable {variable} is used in premises that must be disjoint"
                )
            }
            TypeErrorKind::OccursCheck { variable, ty } => {
                write!(f, "cannot construct infinite type {variable} = {ty}")
            }
            TypeErrorKind::UnificationFailure { left, right } => {
                write!(f, "cannot unify {left} with {right}")
            }
        }
    }
}

impl core::error::Error for TypeError {}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Report every clash as a unification failure.
    Infer,
    /// Report clashes by the rule that caused them.
    Check,
}

enum Clash {
    Mismatch,
    Occurs(u32, TypeScheme),
}

struct Inference<'a> {
    ctx: &'a TypingContext,
    mode: Mode,
    bindings: Vec<Option<TypeScheme>>,
}

impl<'a> Inference<'a> {
    fn new(ctx: &'a TypingContext, mode: Mode) -> Self {
        Inference {
            ctx,
            mode,
            bindings: Vec::new(),
        }
    }

    fn fresh(&mut self) -> TypeScheme {
        self.bindings.push(None);
        TypeScheme::Var((self.bindings.len() - 1) as u32)
    }

    /// Fully applies the current substitution.
    fn resolve(&self, t: &TypeScheme) -> TypeScheme {
        match t {
            TypeScheme::Var(v) => match &self.bindings[*v as usize] {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            TypeScheme::Bool => TypeScheme::Bool,
            TypeScheme::Arrow(a, b) => TypeScheme::arrow(self.resolve(a), self.resolve(b)),
        }
    }

    fn occurs(&self, v: u32, t: &TypeScheme) -> bool {
        match self.resolve(t) {
            TypeScheme::Var(w) => v == w,
            TypeScheme::Bool => false,
            TypeScheme::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
        }
    }

    fn unify(&mut self, a: &TypeScheme, b: &TypeScheme) -> Result<(), Clash> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (TypeScheme::Var(v), TypeScheme::Var(w)) if v == w => Ok(()),
            (TypeScheme::Var(v), other) | (other, TypeScheme::Var(v)) => {
                if self.occurs(*v, other) {
                    return Err(Clash::Occurs(*v, other.clone()));
                }
                self.bindings[*v as usize] = Some(other.clone());
                Ok(())
            }
            (TypeScheme::Bool, TypeScheme::Bool) => Ok(()),
            (TypeScheme::Arrow(a1, b1), TypeScheme::Arrow(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(Clash::Mismatch),
        }
    }

    fn error(&self, kind: TypeErrorKind, t: &Term, path: &[Direction]) -> TypeError {
        TypeError::new(kind, Rule::of(t, Discipline::Simple), self.ctx, t, path)
    }

    /// Unifies and turns a clash into an error; `checked` builds the
    /// rule-specific error used in check mode.
    fn unify_at(
        &mut self,
        a: &TypeScheme,
        b: &TypeScheme,
        t: &Term,
        path: &[Direction],
        checked: impl FnOnce(TypeScheme, TypeScheme) -> TypeErrorKind,
    ) -> Result<(), TypeError> {
        match self.unify(a, b) {
            Ok(()) => Ok(()),
            Err(Clash::Occurs(v, ty)) => {
                let kind = TypeErrorKind::OccursCheck {
                    variable: TypeScheme::Var(v),
                    ty: self.resolve(&ty),
                };
                Err(self.error(kind, t, path))
            }
            Err(Clash::Mismatch) => {
                let (a, b) = (self.resolve(a), self.resolve(b));
                let kind = match self.mode {
                    Mode::Infer => TypeErrorKind::UnificationFailure { left: a, right: b },
                    Mode::Check => checked(a, b),
                };
                Err(self.error(kind, t, path))
            }
        }
    }

    fn infer(
        &mut self,
        t: &Term,
        binders: &mut Vec<TypeScheme>,
        path: &mut Vec<Direction>,
    ) -> Result<TypeScheme, TypeError> {
        match t {
            Term::Var(i) => {
                let depth = binders.len();
                if *i < depth {
                    return Ok(binders[depth - 1 - i].clone());
                }
                match self.ctx.get(i - depth) {
                    Some((_, ty)) => Ok(ty.into()),
                    None => {
                        Err(self.error(TypeErrorKind::UnboundVariable { slot: i - depth }, t, path))
                    }
                }
            }
            Term::One | Term::Zero | Term::Coin => Ok(TypeScheme::Bool),
            Term::Lam(body) => {
                let dom = self.fresh();
                binders.push(dom.clone());
                path.push(Direction::Body);
                let cod = self.infer(body, binders, path);
                path.pop();
                binders.pop();
                Ok(TypeScheme::arrow(dom, cod?))
            }
            Term::App(f, a) => {
                path.push(Direction::Fun);
                let tf = self.infer(f, binders, path);
                path.pop();
                let tf = tf?;
                path.push(Direction::Arg);
                let ta = self.infer(a, binders, path);
                path.pop();
                let ta = ta?;
                match self.resolve(&tf) {
                    TypeScheme::Bool if self.mode == Mode::Check => {
                        let kind = TypeErrorKind::NonFunctionApplied {
                            actual: TypeScheme::Bool,
                        };
                        Err(self.error(kind, t, path))
                    }
                    TypeScheme::Arrow(dom, cod) => {
                        self.unify_at(&dom, &ta, t, path, |expected, actual| {
                            TypeErrorKind::TypeMismatch { expected, actual }
                        })?;
                        Ok(*cod)
                    }
                    _ => {
                        let cod = self.fresh();
                        let want = TypeScheme::arrow(ta, cod.clone());
                        self.unify_at(&tf, &want, t, path, |expected, actual| {
                            TypeErrorKind::TypeMismatch { expected, actual }
                        })?;
                        Ok(cod)
                    }
                }
            }
            Term::If(c, th, el) => {
                path.push(Direction::Cond);
                let tc = self.infer(c, binders, path);
                path.pop();
                let tc = tc?;
                self.unify_at(&tc, &TypeScheme::Bool, t, path, |actual, _| {
                    TypeErrorKind::NonBoolCondition { actual }
                })?;
                path.push(Direction::Then);
                let tt = self.infer(th, binders, path);
                path.pop();
                let tt = tt?;
                path.push(Direction::Else);
                let te = self.infer(el, binders, path);
                path.pop();
                let te = te?;
                self.unify_at(&tt, &te, t, path, |expected, actual| {
                    TypeErrorKind::TypeMismatch { expected, actual }
                })?;
                Ok(tt)
            }
            Term::Oplus(_, l, r) => {
                path.push(Direction::OplusLeft);
                let tl = self.infer(l, binders, path);
                path.pop();
                let tl = tl?;
                path.push(Direction::OplusRight);
                let tr = self.infer(r, binders, path);
                path.pop();
                let tr = tr?;
                self.unify_at(&tl, &tr, t, path, |expected, actual| {
                    TypeErrorKind::TypeMismatch { expected, actual }
                })?;
                Ok(tl)
            }
        }
    }
}

/// Principal simple type of `t` in `ctx`, with variables numbered by
/// first occurrence.
pub fn infer_simple(ctx: &TypingContext, t: &Term) -> Result<TypeScheme, TypeError> {
    let mut inf = Inference::new(ctx, Mode::Infer);
    let ty = inf.infer(t, &mut Vec::new(), &mut Vec::new())?;
    Ok(inf.resolve(&ty).canonical())
}

/// Checks `t` under discipline `d` and returns its type: the principal
/// simple type with every remaining type variable instantiated at `𝔹`.
pub fn typecheck(ctx: &TypingContext, t: &Term, d: Discipline) -> Result<Type, TypeError> {
    let mut inf = Inference::new(ctx, Mode::Check);
    let ty = inf.infer(t, &mut Vec::new(), &mut Vec::new())?;
    check_usage(ctx, t, d)?;
    Ok(inf.resolve(&ty).ground())
}

/// Checks `t` against a given type under discipline `d`.
pub fn check(ctx: &TypingContext, t: &Term, goal: &Type, d: Discipline) -> Result<(), TypeError> {
    let mut inf = Inference::new(ctx, Mode::Check);
    let ty = inf.infer(t, &mut Vec::new(), &mut Vec::new())?;
    inf.unify_at(&ty, &goal.into(), t, &[], |actual, expected| {
        TypeErrorKind::TypeMismatch { expected, actual }
    })?;
    check_usage(ctx, t, d)
}

/// Verifies the sharing restrictions of `d`; a no-op for `Simple`.
fn check_usage(ctx: &TypingContext, t: &Term, d: Discipline) -> Result<(), TypeError> {
    if d == Discipline::Simple {
        return Ok(());
    }
    Usage { ctx, discipline: d }
        .used(t, 0, &mut Vec::new())
        .map(|_| ())
}

struct Usage<'a> {
    ctx: &'a TypingContext,
    discipline: Discipline,
}

impl Usage<'_> {
    /// Ids of variables used by `t`: context slot `k` is `k`, the binder at
    /// nesting level `l` is `ctx.len() + l`.
    fn used(
        &self,
        t: &Term,
        depth: usize,
        path: &mut Vec<Direction>,
    ) -> Result<BTreeSet<usize>, TypeError> {
        let n = self.ctx.len();
        let sub = |child: &Term, d: Direction, depth: usize, path: &mut Vec<Direction>| {
            path.push(d);
            let r = self.used(child, depth, path);
            path.pop();
            r
        };
        match t {
            Term::Var(i) if *i < depth => Ok(BTreeSet::from([n + depth - 1 - i])),
            Term::Var(i) => Ok(BTreeSet::from([i - depth])),
            Term::One | Term::Zero | Term::Coin => Ok(BTreeSet::new()),
            Term::Lam(b) => {
                let mut u = sub(b, Direction::Body, depth + 1, path)?;
                u.remove(&(n + depth));
                Ok(u)
            }
            Term::App(f, a) => {
                let uf = sub(f, Direction::Fun, depth, path)?;
                let ua = sub(a, Direction::Arg, depth, path)?;
                self.disjoint(&uf, &ua, t, path)?;
                Ok(&uf | &ua)
            }
            Term::If(c, th, el) => {
                let uc = sub(c, Direction::Cond, depth, path)?;
                let ut = sub(th, Direction::Then, depth, path)?;
                let ue = sub(el, Direction::Else, depth, path)?;
                let branches = &ut | &ue;
                self.disjoint(&uc, &branches, t, path)?;
                if self.discipline == Discipline::Affine {
                    self.disjoint(&ut, &ue, t, path)?;
                }
                Ok(&uc | &branches)
            }
            Term::Oplus(_, l, r) => {
                let ul = sub(l, Direction::OplusLeft, depth, path)?;
                let ur = sub(r, Direction::OplusRight, depth, path)?;
                Ok(&ul | &ur)
            }
        }
    }

    fn disjoint(
        &self,
        a: &BTreeSet<usize>,
        b: &BTreeSet<usize>,
        t: &Term,
        path: &[Direction],
    ) -> Result<(), TypeError> {
        let Some(&shared) = a.intersection(b).next() else {
            return Ok(());
        };
        let n = self.ctx.len();
        let variable = if shared < n {
            self.ctx
                .get(shared)
                .map(|(name, _)| name.clone())
                .unwrap_or_default()
        } else {
            alloc::format!("x{}", shared - n)
        };
        Err(TypeError::new(
            TypeErrorKind::AffinityViolation { variable },
            Rule::of(t, self.discipline),
            self.ctx,
            t,
            path,
        ))
    }
}
