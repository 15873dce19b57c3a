//! Elimination contexts and computational equivalence of distributions.
//!
//! An elimination context of type `A = A1 -> ... -> An -> 𝔹` is
//! `◊ v1 ... vn` with each `vi` a closed normal term of type `Ai`. Two
//! distributions of closed terms of type `A` are computationally
//! equivalent when every elimination context drives both to the same
//! distribution of booleans. Contexts are enumerated up to a bound on the
//! size of their arguments; for first-order `A` the bounded set is already
//! complete since the only closed normal booleans are `0` and `1`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::distribution::Distribution;
use crate::explore::{reduce_with_strategy, Explorer, FuelExhausted, Stats};
use crate::rewrite::{CalculusVariant, Strategy};
use crate::syntax::{pretty, Rational, Term, Type};
use crate::typing::{check, typecheck, Discipline, TypeError, TypingContext};

/// `◊ v1 ... vn`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EliminationContext {
    pub args: Vec<Term>,
    /// The type of terms this context accepts.
    pub target_type: Type,
}

impl fmt::Display for EliminationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("◊")?;
        for a in &self.args {
            match a {
                Term::Var(_) | Term::One | Term::Zero | Term::Coin => write!(f, " {}", pretty(a))?,
                _ => write!(f, " ({})", pretty(a))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for EliminationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// How plugged terms are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PlugEval {
    /// Explore every reduction path and require a single outcome.
    #[default]
    Exhaustive,
    /// Follow the call-by-value path only.
    SinglePath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivOptions {
    pub size_bound: usize,
    pub fuel: u64,
    pub eval: PlugEval,
    pub variant: CalculusVariant,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            size_bound: crate::DEFAULT_SIZE_BOUND,
            fuel: crate::DEFAULT_FUEL,
            eval: PlugEval::Exhaustive,
            variant: CalculusVariant::Plain,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivError {
    Fuel(FuelExhausted),
    /// A plugged term reaches more than one normal-form distribution.
    NonConfluentPlug {
        context: EliminationContext,
        term: Term,
        distributions: Vec<Distribution>,
    },
    /// A support term is not closed or does not have the requested type.
    Type(TypeError),
    NotSubAffineTyped(TypeError),
}

impl fmt::Display for EquivError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivError::Fuel(e) => e.fmt(f),
            EquivError::NonConfluentPlug {
                context,
                term,
                distributions,
            } => write!(
                f,
                "plugging `{term}` into {context} reaches {} distinct normal-form distributions",
                distributions.len()
            ),
            EquivError::Type(e) => write!(f, "ill-typed support term: {e}"),
            EquivError::NotSubAffineTyped(e) => write!(f, "term is not sub-affine typed: {e}"),
        }
    }
}

impl core::error::Error for EquivError {}

impl From<FuelExhausted> for EquivError {
    fn from(e: FuelExhausted) -> Self {
        EquivError::Fuel(e)
    }
}

/// Closed normal terms of size `size` with `depth` binders in scope.
/// Only normal terms are built: no `coin`, no beta redex and no if-redex.
fn normal_terms(
    size: usize,
    depth: usize,
    cache: &mut BTreeMap<(usize, usize), Vec<Term>>,
) -> Vec<Term> {
    if let Some(ts) = cache.get(&(size, depth)) {
        return ts.clone();
    }
    let mut out = Vec::new();
    match size {
        0 => {}
        1 => {
            out.push(Term::Zero);
            out.push(Term::One);
            out.extend((0..depth).map(Term::Var));
        }
        _ => {
            for body in normal_terms(size - 1, depth + 1, cache) {
                out.push(Term::lam(body));
            }
            for fs in 1..size - 1 {
                let funs = normal_terms(fs, depth, cache);
                let args = normal_terms(size - 1 - fs, depth, cache);
                for f in funs.iter().filter(|f| !matches!(f, Term::Lam(_))) {
                    for a in &args {
                        out.push(Term::app(f.clone(), a.clone()));
                    }
                }
            }
            for cs in 1..size - 1 {
                let conds: Vec<Term> = normal_terms(cs, depth, cache)
                    .into_iter()
                    .filter(|c| !matches!(c, Term::Zero | Term::One))
                    .collect();
                if conds.is_empty() {
                    continue;
                }
                for ts in 1..size - 1 - cs {
                    let es = size - 1 - cs - ts;
                    let thens = normal_terms(ts, depth, cache);
                    let elses = normal_terms(es, depth, cache);
                    for c in &conds {
                        for t in &thens {
                            for e in &elses {
                                out.push(Term::ite(c.clone(), t.clone(), e.clone()));
                            }
                        }
                    }
                }
            }
        }
    }
    cache.insert((size, depth), out.clone());
    out
}

/// All closed normal terms of simple type `ty` with size at most
/// `size_bound`, ordered by size and then by canonical text.
pub fn enum_normal_closed(ty: &Type, size_bound: usize) -> Vec<Term> {
    let mut cache = BTreeMap::new();
    let empty = TypingContext::empty();
    let mut out = Vec::new();
    for size in 1..=size_bound {
        let mut layer: Vec<Term> = normal_terms(size, 0, &mut cache)
            .into_iter()
            .filter(|t| check(&empty, t, ty, Discipline::Simple).is_ok())
            .collect();
        layer.sort_by_cached_key(pretty);
        out.extend(layer);
    }
    out
}

/// Every elimination context of `ty` whose arguments have size at most
/// `size_bound`, in lexicographic order of argument lists.
pub fn enum_contexts(ty: &Type, size_bound: usize) -> Vec<EliminationContext> {
    let mut cache: BTreeMap<&Type, Vec<Term>> = BTreeMap::new();
    let arg_types = ty.arguments();
    for a in &arg_types {
        cache
            .entry(*a)
            .or_insert_with(|| enum_normal_closed(a, size_bound));
    }
    let mut contexts = vec![Vec::new()];
    for a in &arg_types {
        let candidates = &cache[*a];
        contexts = contexts
            .into_iter()
            .flat_map(|prefix: Vec<Term>| {
                candidates.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect();
    }
    contexts
        .into_iter()
        .map(|args| EliminationContext {
            args,
            target_type: ty.clone(),
        })
        .collect()
}

/// `C⟨t⟩ = t v1 ... vn`, after checking `⊢ t : C.target_type`.
pub fn plug(c: &EliminationContext, t: &Term) -> Result<Term, TypeError> {
    check(
        &TypingContext::empty(),
        t,
        &c.target_type,
        Discipline::Simple,
    )?;
    Ok(Term::apps(t.clone(), c.args.iter().cloned()))
}

/// Per-context results of an equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivVerdict {
    pub equivalent: bool,
    pub per_context_results: Vec<(EliminationContext, Distribution, Distribution)>,
    /// The first context whose results differ.
    pub failing_context: Option<EliminationContext>,
}

impl fmt::Display for EquivVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, a, b) in &self.per_context_results {
            let status = if a == b { "OK" } else { "MISMATCH" };
            writeln!(f, "{c} | {a} | {b} | {status}")?;
        }
        f.write_str(if self.equivalent {
            "EQUIVALENT"
        } else {
            "NOT EQUIVALENT"
        })?;
        if let Some(c) = &self.failing_context {
            write!(f, " (failing context: {c})")?;
        }
        Ok(())
    }
}

struct Evaluator {
    explorer: Explorer,
    options: EquivOptions,
}

impl Evaluator {
    fn new(options: EquivOptions) -> Self {
        Evaluator {
            explorer: Explorer::new(options.variant, options.fuel),
            options,
        }
    }

    /// `[(p_i * u_ik, b_ik)]` for the support of `d` plugged into `c`.
    fn run(
        &mut self,
        c: &EliminationContext,
        d: &Distribution,
    ) -> Result<Distribution, EquivError> {
        let mut parts: Vec<(Rational, Distribution)> = Vec::new();
        for (t, p) in d.iter() {
            let plugged = plug(c, t).map_err(EquivError::Type)?;
            let result = match self.options.eval {
                PlugEval::Exhaustive => {
                    let mut all = self.explorer.explore(&plugged)?;
                    if all.len() != 1 {
                        return Err(EquivError::NonConfluentPlug {
                            context: c.clone(),
                            term: plugged,
                            distributions: all,
                        });
                    }
                    all.remove(0)
                }
                PlugEval::SinglePath => reduce_with_strategy(
                    &plugged,
                    Strategy::CallByValue,
                    self.options.variant,
                    self.options.fuel,
                )?
                .terminal()
                .clone(),
            };
            parts.push((p.clone(), result));
        }
        Ok(Distribution::combine(&parts).expect("support probabilities form a distribution"))
    }
}

fn check_support(d: &Distribution, ty: &Type) -> Result<(), EquivError> {
    for (t, _) in d.iter() {
        check(&TypingContext::empty(), t, ty, Discipline::Simple).map_err(EquivError::Type)?;
    }
    Ok(())
}

/// Decides `d1 ≡ d2` at type `ty` over the bounded context set.
pub fn comp_equiv(
    d1: &Distribution,
    d2: &Distribution,
    ty: &Type,
    options: &EquivOptions,
) -> Result<EquivVerdict, EquivError> {
    let contexts = enum_contexts(ty, options.size_bound);
    comp_equiv_in(d1, d2, ty, &contexts, &mut Evaluator::new(*options))
}

fn comp_equiv_in(
    d1: &Distribution,
    d2: &Distribution,
    ty: &Type,
    contexts: &[EliminationContext],
    eval: &mut Evaluator,
) -> Result<EquivVerdict, EquivError> {
    check_support(d1, ty)?;
    check_support(d2, ty)?;
    let mut per_context_results = Vec::with_capacity(contexts.len());
    let mut failing_context = None;
    for c in contexts {
        let a = eval.run(c, d1)?;
        let b = eval.run(c, d2)?;
        if a != b && failing_context.is_none() {
            failing_context = Some(c.clone());
        }
        per_context_results.push((c.clone(), a, b));
    }
    Ok(EquivVerdict {
        equivalent: failing_context.is_none(),
        per_context_results,
        failing_context,
    })
}

/// Result of checking that every pair of reachable normal-form
/// distributions of a term is computationally equivalent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputationalReport {
    pub term_type: Type,
    pub size_bound: usize,
    pub distributions: Vec<Distribution>,
    /// `matrix[i][j]` is the verdict for `distributions[i] ≡ distributions[j]`.
    pub matrix: Vec<Vec<bool>>,
    pub pairs: Vec<(usize, usize, EquivVerdict)>,
    pub confluent: bool,
    pub stats: Stats,
}

impl fmt::Display for ComputationalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}",
            if self.confluent {
                "COMPUTATIONALLY CONFLUENT"
            } else {
                "NOT COMPUTATIONALLY CONFLUENT"
            }
        )?;
        writeln!(f, "type: {}", self.term_type)?;
        writeln!(f, "size bound: {}", self.size_bound)?;
        for (i, d) in self.distributions.iter().enumerate() {
            writeln!(f, "D{i} = {d}")?;
        }
        for row in &self.matrix {
            let cells: Vec<&str> = row.iter().map(|&b| if b { "≡" } else { "≢" }).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        for (i, j, v) in &self.pairs {
            writeln!(f, "D{i} vs D{j}:")?;
            writeln!(f, "{v}")?;
        }
        write!(f, "{}", self.stats)
    }
}

/// Checks that a closed sub-affine-typed term reaches only pairwise
/// computationally equivalent distributions.
pub fn check_computational_confluence(
    t: &Term,
    options: &EquivOptions,
) -> Result<ComputationalReport, EquivError> {
    let ty = typecheck(&TypingContext::empty(), t, Discipline::SubAffine)
        .map_err(EquivError::NotSubAffineTyped)?;
    let mut eval = Evaluator::new(*options);
    let distributions = eval.explorer.explore(t)?;
    let stats = eval.explorer.stats();
    let contexts = enum_contexts(&ty, options.size_bound);
    let n = distributions.len();
    let mut matrix = vec![vec![true; n]; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = comp_equiv_in(
                &distributions[i],
                &distributions[j],
                &ty,
                &contexts,
                &mut eval,
            )?;
            matrix[i][j] = v.equivalent;
            matrix[j][i] = v.equivalent;
            pairs.push((i, j, v));
        }
    }
    let confluent = matrix.iter().flatten().all(|&b| b);
    Ok(ComputationalReport {
        term_type: ty,
        size_bound: options.size_bound,
        distributions,
        matrix,
        pairs,
        confluent,
        stats,
    })
}

/// Renders a context list on one line, e.g. `◊ 0, ◊ 1`.
pub fn render_contexts(cs: &[EliminationContext]) -> String {
    let parts: Vec<String> = cs.iter().map(|c| alloc::format!("{c}")).collect();
    parts.join(", ")
}
