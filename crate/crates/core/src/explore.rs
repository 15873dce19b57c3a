//! Exhaustive enumeration of normal-form distributions, strategy traces,
//! and probabilistic-confluence verdicts.
//!
//! The set of normal-form distributions reachable from a term `t` is
//!
//! ```text
//! NF(t) = { [(1, t)] }                                   if t is normal
//! NF(t) = ⋃_pos { Σ_i p_i · D_i | D_i ∈ NF(t_i) }         otherwise
//! ```
//!
//! where `pos` ranges over the redexes of `t` and `[(p_i, t_i)]` is the
//! outcome of firing `pos`. Each outcome picks its continuation
//! independently. The recursion is evaluated bottom-up with an explicit
//! stack and a memo table keyed by term.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::distribution::{sort_canonical, Distribution};
use crate::rewrite::{
    is_normal, redexes, select_redex, step_at, CalculusVariant, Position, Strategy,
};
use crate::syntax::{Rational, Term};

/// Exploration ran out of budget, or found a reduction cycle (which no
/// budget could get past).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuelExhausted {
    pub fuel: u64,
    pub visited: u64,
    pub memo_entries: usize,
    pub cycle: bool,
}

impl fmt::Display for FuelExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fuel exhausted: visited {} terms (fuel {}), {} fully explored",
            self.visited, self.fuel, self.memo_entries
        )?;
        if self.cycle {
            f.write_str("; reduction cycle detected")?;
        }
        Ok(())
    }
}

impl core::error::Error for FuelExhausted {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Distinct terms expanded.
    pub nodes_visited: u64,
    /// Longest chain of terms under exploration at once.
    pub max_depth: usize,
    pub fuel_spent: u64,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stats: nodes={} max_depth={} fuel={}",
            self.nodes_visited, self.max_depth, self.fuel_spent
        )
    }
}

/// Memoizing explorer. The memo table survives across calls; fuel and
/// statistics are per call.
pub struct Explorer {
    variant: CalculusVariant,
    fuel: u64,
    memo: BTreeMap<Term, BTreeSet<Distribution>>,
    stats: Stats,
}

impl Explorer {
    pub fn new(variant: CalculusVariant, fuel: u64) -> Self {
        Explorer {
            variant,
            fuel,
            memo: BTreeMap::new(),
            stats: Stats::default(),
        }
    }

    pub fn variant(&self) -> CalculusVariant {
        self.variant
    }

    /// Statistics of the last call.
    pub fn stats(&self) -> Stats {
        self.stats
    }

    /// All normal-form distributions reachable from `t`, sorted by their
    /// canonical text.
    pub fn explore(&mut self, t: &Term) -> Result<Vec<Distribution>, FuelExhausted> {
        self.stats = Stats::default();
        self.fill(t)?;
        let mut out: Vec<Distribution> = self.memo[t].iter().cloned().collect();
        sort_canonical(&mut out);
        Ok(out)
    }

    fn exhausted(&self, cycle: bool) -> FuelExhausted {
        FuelExhausted {
            fuel: self.fuel,
            visited: self.stats.nodes_visited,
            memo_entries: self.memo.len(),
            cycle,
        }
    }

    fn successors(&self, t: &Term) -> Vec<Vec<(Rational, Term)>> {
        redexes(t)
            .iter()
            .map(|pos| {
                step_at(t, pos, self.variant)
                    .expect("enumerated redex fires")
                    .into_outcomes()
            })
            .collect()
    }

    fn fill(&mut self, root: &Term) -> Result<(), FuelExhausted> {
        if self.memo.contains_key(root) {
            return Ok(());
        }
        struct Frame {
            term: Term,
            succ: Vec<Vec<(Rational, Term)>>,
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut on_stack: BTreeSet<Term> = BTreeSet::new();
        let mut pending = Some(root.clone());

        loop {
            if let Some(t) = pending.take() {
                self.stats.nodes_visited += 1;
                self.stats.fuel_spent += 1;
                if self.stats.nodes_visited > self.fuel {
                    return Err(self.exhausted(false));
                }
                if is_normal(&t) {
                    self.memo
                        .insert(t.clone(), BTreeSet::from([Distribution::dirac(t)]));
                } else {
                    let succ = self.successors(&t);
                    on_stack.insert(t.clone());
                    stack.push(Frame { term: t, succ });
                    self.stats.max_depth = self.stats.max_depth.max(stack.len());
                }
            }
            let Some(top) = stack.last() else { break };
            let missing = top
                .succ
                .iter()
                .flatten()
                .map(|(_, r)| r)
                .find(|r| !self.memo.contains_key(*r));
            match missing {
                Some(r) if on_stack.contains(r) => return Err(self.exhausted(true)),
                Some(r) => pending = Some(r.clone()),
                None => {
                    let frame = stack.pop().expect("non-empty stack");
                    on_stack.remove(&frame.term);
                    let result = self.combine_all(&frame.succ);
                    self.memo.insert(frame.term, result);
                }
            }
        }
        Ok(())
    }

    /// Union over redexes of all independent convex combinations of the
    /// outcomes' normal-form distributions.
    fn combine_all(&self, succ: &[Vec<(Rational, Term)>]) -> BTreeSet<Distribution> {
        let mut out = BTreeSet::new();
        for outcomes in succ {
            let choices: Vec<Vec<&Distribution>> = outcomes
                .iter()
                .map(|(_, r)| self.memo[r].iter().collect())
                .collect();
            let mut index = alloc::vec![0usize; choices.len()];
            loop {
                let picked = outcomes
                    .iter()
                    .zip(&index)
                    .enumerate()
                    .map(|(k, ((p, _), &i))| (p, choices[k][i]));
                out.insert(Distribution::combine_unchecked(picked));
                // Odometer over the cartesian product.
                let mut k = 0;
                loop {
                    if k == index.len() {
                        break;
                    }
                    index[k] += 1;
                    if index[k] < choices[k].len() {
                        break;
                    }
                    index[k] = 0;
                    k += 1;
                }
                if k == index.len() {
                    break;
                }
            }
        }
        out
    }
}

/// All normal-form distributions reachable from `t`, in canonical order.
pub fn normal_form_distributions(
    t: &Term,
    variant: CalculusVariant,
    fuel: u64,
) -> Result<Vec<Distribution>, FuelExhausted> {
    Explorer::new(variant, fuel).explore(t)
}

/// One lifted step of a strategy trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// The redex fired in each non-normal support term of the previous
    /// distribution, in canonical order.
    pub fired: Vec<(Term, Position)>,
    pub result: Distribution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Distribution,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn terminal(&self) -> &Distribution {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start: {}", self.start)?;
        for (i, step) in self.steps.iter().enumerate() {
            let fired: Vec<String> = step
                .fired
                .iter()
                .map(|(t, p)| alloc::format!("{p} in {t}"))
                .collect();
            writeln!(
                f,
                "step {}: [{}] -> {}",
                i + 1,
                fired.join(" ; "),
                step.result
            )?;
        }
        write!(f, "terminal: {}", self.terminal())
    }
}

/// Reduces `dirac(t)` with `strategy` until every support term is normal.
/// Fuel is counted in individual term steps.
pub fn reduce_with_strategy(
    t: &Term,
    strategy: Strategy,
    variant: CalculusVariant,
    fuel: u64,
) -> Result<Trace, FuelExhausted> {
    let start = Distribution::dirac(t.clone());
    let mut current = start.clone();
    let mut steps = Vec::new();
    let mut spent = 0u64;
    while !current.is_normal() {
        let mut fired: Vec<(Term, Position)> = current
            .iter()
            .filter(|(t, _)| !is_normal(t))
            .map(|(t, _)| {
                (
                    t.clone(),
                    select_redex(t, strategy).expect("non-normal term"),
                )
            })
            .collect();
        spent += fired.len() as u64;
        if spent > fuel {
            return Err(FuelExhausted {
                fuel,
                visited: spent,
                memo_entries: 0,
                cycle: false,
            });
        }
        fired.sort_by_cached_key(|(t, _)| crate::syntax::pretty(t));
        let next = current
            .lift_step(|t| select_redex(t, strategy), variant)
            .expect("strategy picks a redex");
        steps.push(TraceStep {
            fired,
            result: next.clone(),
        });
        current = next;
    }
    Ok(Trace { start, steps })
}

/// Outcome of a probabilistic-confluence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorationResult {
    /// In canonical order.
    pub final_distributions: Vec<Distribution>,
    pub confluent: bool,
    /// The two smallest distinct members, when not confluent.
    pub witness: Option<(Distribution, Distribution)>,
    pub stats: Stats,
}

impl fmt::Display for ExplorationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}",
            if self.confluent {
                "CONFLUENT"
            } else {
                "NOT CONFLUENT"
            }
        )?;
        for d in &self.final_distributions {
            writeln!(f, "{d}")?;
        }
        write!(f, "{}", self.stats)
    }
}

pub fn check_probabilistic_confluence(
    t: &Term,
    variant: CalculusVariant,
    fuel: u64,
) -> Result<ExplorationResult, FuelExhausted> {
    let mut explorer = Explorer::new(variant, fuel);
    let finals = explorer.explore(t)?;
    let confluent = finals.len() == 1;
    let witness = (!confluent).then(|| (finals[0].clone(), finals[1].clone()));
    Ok(ExplorationResult {
        final_distributions: finals,
        confluent,
        witness,
        stats: explorer.stats(),
    })
}
