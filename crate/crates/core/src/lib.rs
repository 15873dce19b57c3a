//! Core of the lambda-coin workbench.
//!
//! The calculus is the simply typed lambda calculus with booleans, an
//! if-then-else construct and a fair `coin`. This crate holds everything
//! that is pure computation: terms and their concrete syntax, the three
//! typing disciplines (simple, affine, sub-affine), one-step probabilistic
//! rewriting, exact distributions over terms, exhaustive exploration of
//! normal-form distributions, and computational equivalence.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::result_large_err)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod distribution;
pub mod equivalence;
pub mod explore;
pub mod rewrite;
pub mod syntax;
pub mod typing;

pub use distribution::{dist_eq, sort_canonical, Distribution, DistributionError};
pub use equivalence::{
    check_computational_confluence, comp_equiv, enum_contexts, enum_normal_closed, plug,
    render_contexts, ComputationalReport, EliminationContext, EquivError, EquivOptions,
    EquivVerdict, PlugEval,
};
pub use explore::{
    check_probabilistic_confluence, normal_form_distributions, reduce_with_strategy,
    ExplorationResult, Explorer, FuelExhausted, Stats, Trace, TraceStep,
};
pub use rewrite::{
    is_normal, redexes, select_redex, step_at, stuck_oplus, subterm, CalculusVariant, Direction,
    Position, RewriteError, StepOutcome, Strategy,
};
pub use syntax::{
    alpha_eq, parse, parse_closed, parse_in, pretty, pretty_in, ParseError, ParseErrorKind, Parsed,
    Rational, Term, Type,
};
pub use typing::{
    check, infer_simple, typecheck, Discipline, Rule, TypeError, TypeErrorKind, TypeScheme,
    TypingContext,
};

/// Default exploration budget, in visited terms.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Default size bound for arguments of elimination contexts.
pub const DEFAULT_SIZE_BOUND: usize = 6;
