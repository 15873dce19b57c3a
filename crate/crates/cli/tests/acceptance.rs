//! Acceptance criteria. Every criterion prints one PASS/FAIL line; the test
//! fails if any criterion does. Run with `--nocapture` to see the lines.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use lambcoin_core::{
    check_probabilistic_confluence, comp_equiv, enum_contexts, normal_form_distributions,
    reduce_with_strategy, typecheck, CalculusVariant, Discipline, Distribution, EquivOptions,
    Rational, Strategy, Term, Type, TypeErrorKind, TypingContext,
};
use lambcoin_testkit::suites::{self, CriticalPair};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Probabilities are compared exactly: zero tolerance.
const SMALL_LIMIT: Duration = Duration::from_secs(1);
const SUITE_LIMIT: Duration = Duration::from_secs(300);
const CONFLUENCE_INSTANCES: usize = 500;
const AFFINE_INSTANCES: usize = 500;
const SUBSTITUTION_INSTANCES: usize = 1000;
const PAIR_INSTANCES: usize = 200;
const SIZE_BOUND: usize = 6;
const FUEL: u64 = lambcoin_core::DEFAULT_FUEL;
const SEED: u64 = 0x1a3b_c0de;

const DUP_COIN: &str = "(\\x.\\y. y x x) coin";

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn dist(pairs: Vec<(Rational, Term)>) -> Distribution {
    Distribution::from_pairs(pairs).unwrap()
}

/// `λy. y a b`.
fn apply_y(a: Term, b: Term) -> Term {
    Term::lam(Term::apps(Term::var(0), [a, b]))
}

/// `λy. if y then a else b`.
fn branch_y(a: bool, b: bool) -> Term {
    Term::lam(Term::ite(Term::var(0), Term::bool(a), Term::bool(b)))
}

fn dup_term() -> Term {
    let body = Term::lam(Term::lam(Term::apps(
        Term::var(0),
        [Term::var(1), Term::var(1)],
    )));
    Term::app(body, Term::Coin)
}

fn branch_term() -> Term {
    let not = Term::lam(Term::ite(Term::var(0), Term::Zero, Term::One));
    let body = Term::ite(Term::var(0), Term::var(1), Term::app(not, Term::var(1)));
    Term::app(Term::lam(Term::lam(body)), Term::Coin)
}

fn dup_halves() -> Distribution {
    dist(vec![
        (q(1, 2), apply_y(Term::Zero, Term::Zero)),
        (q(1, 2), apply_y(Term::One, Term::One)),
    ])
}

fn dup_quarters() -> Distribution {
    let mut pairs = Vec::new();
    for a in [false, true] {
        for b in [false, true] {
            pairs.push((q(1, 4), apply_y(Term::bool(a), Term::bool(b))));
        }
    }
    dist(pairs)
}

fn fair_bit() -> Distribution {
    dist(vec![(q(1, 2), Term::Zero), (q(1, 2), Term::One)])
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if elapsed > limit {
        out.pass = false;
        out.detail = format!("{} (took {elapsed:.2?}, limit {limit:?})", out.detail);
    } else {
        out.detail = format!("{} [{elapsed:.2?}]", out.detail);
    }
    out
}

fn criterion_1() -> Outcome {
    timed(SMALL_LIMIT, || {
        let out = Command::new(env!("CARGO_BIN_EXE_lambcoin"))
            .args(["explore", DUP_COIN])
            .env_remove("LAMBCOIN_FUEL")
            .output()
            .unwrap();
        let text = String::from_utf8(out.stdout).unwrap();
        let printed: BTreeSet<&str> = text.lines().filter(|l| l.starts_with('{')).collect();
        let expected_text: BTreeSet<String> = [dup_halves(), dup_quarters()]
            .iter()
            .map(Distribution::canonical)
            .collect();
        let expected_text: BTreeSet<&str> = expected_text.iter().map(String::as_str).collect();
        let lib: BTreeSet<Distribution> =
            normal_form_distributions(&dup_term(), CalculusVariant::Plain, FUEL)
                .unwrap()
                .into_iter()
                .collect();
        let expected = BTreeSet::from([dup_halves(), dup_quarters()]);
        if out.status.code() == Some(0) && printed == expected_text && lib == expected {
            pass("two endpoints, exact 1/2 and 1/4 weights")
        } else {
            fail(format!("cli printed {printed:?}, library gave {lib:?}"))
        }
    })
}

fn criterion_2() -> Outcome {
    timed(SMALL_LIMIT, || {
        let t = dup_term();
        let cbv =
            reduce_with_strategy(&t, Strategy::CallByValue, CalculusVariant::Plain, FUEL).unwrap();
        let cbn =
            reduce_with_strategy(&t, Strategy::CallByName, CalculusVariant::Plain, FUEL).unwrap();
        if *cbv.terminal() == dup_halves() && *cbn.terminal() == dup_quarters() {
            pass(format!(
                "cbv {} steps, cbn {} steps",
                cbv.steps.len(),
                cbn.steps.len()
            ))
        } else {
            fail(format!("cbv {}, cbn {}", cbv.terminal(), cbn.terminal()))
        }
    })
}

fn criterion_3() -> Outcome {
    timed(SMALL_LIMIT, || {
        let t = dup_term();
        let v = CalculusVariant::Internalized;
        let sum = Term::oplus(q(1, 2), Term::Zero, Term::One);
        let expected = Distribution::dirac(apply_y(sum.clone(), sum));
        let cbv = reduce_with_strategy(&t, Strategy::CallByValue, v, FUEL).unwrap();
        let cbn = reduce_with_strategy(&t, Strategy::CallByName, v, FUEL).unwrap();
        let all = normal_form_distributions(&t, v, FUEL).unwrap();
        let r = check_probabilistic_confluence(&t, v, FUEL).unwrap();
        if *cbv.terminal() == expected
            && *cbn.terminal() == expected
            && all == [expected.clone()]
            && r.confluent
        {
            pass(format!("unique endpoint {expected}"))
        } else {
            fail(format!(
                "cbv {}, cbn {}, explore {all:?}",
                cbv.terminal(),
                cbn.terminal()
            ))
        }
    })
}

fn criterion_4() -> Outcome {
    let ctx = TypingContext::empty();
    let dup = dup_term();
    let branch = branch_term();
    let affinity = |r: Result<Type, lambcoin_core::TypeError>| matches!(r, Err(e) if matches!(e.kind, TypeErrorKind::AffinityViolation { .. }));
    let checks = [
        (
            "simple accepts the duplicated coin",
            typecheck(&ctx, &dup, Discipline::Simple).is_ok(),
        ),
        (
            "affine rejects the duplicated coin",
            affinity(typecheck(&ctx, &dup, Discipline::Affine)),
        ),
        (
            "sub-affine accepts the if example",
            typecheck(&ctx, &branch, Discipline::SubAffine).is_ok(),
        ),
        (
            "affine rejects the if example",
            affinity(typecheck(&ctx, &branch, Discipline::Affine)),
        ),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
    if failed.is_empty() {
        pass("all four verdicts as expected")
    } else {
        fail(format!("wrong verdicts: {failed:?}"))
    }
}

fn criterion_5() -> Outcome {
    timed(SMALL_LIMIT, || {
        let halves = dist(vec![
            (q(1, 2), branch_y(false, true)),
            (q(1, 2), branch_y(true, false)),
        ]);
        let mut quarter_pairs = Vec::new();
        for a in [false, true] {
            for b in [false, true] {
                quarter_pairs.push((q(1, 4), branch_y(a, b)));
            }
        }
        let quarters = dist(quarter_pairs);
        let all: BTreeSet<Distribution> =
            normal_form_distributions(&branch_term(), CalculusVariant::Plain, FUEL)
                .unwrap()
                .into_iter()
                .collect();
        if all != BTreeSet::from([halves.clone(), quarters.clone()]) {
            return fail(format!("endpoints {all:?}"));
        }
        let bb = Type::arrow(Type::Bool, Type::Bool);
        let contexts: Vec<String> = enum_contexts(&bb, SIZE_BOUND)
            .iter()
            .map(|c| c.to_string())
            .collect();
        if contexts != ["◊ 0", "◊ 1"] {
            return fail(format!("contexts {contexts:?}"));
        }
        let v = comp_equiv(&halves, &quarters, &bb, &EquivOptions::default()).unwrap();
        let per_context_ok = v
            .per_context_results
            .iter()
            .all(|(_, a, b)| *a == fair_bit() && *b == fair_bit());
        if v.equivalent && per_context_ok && v.per_context_results.len() == 2 {
            pass("both endpoints give { 1/2: 0 ; 1/2: 1 } under ◊ 0 and ◊ 1")
        } else {
            fail(format!("{v}"))
        }
    })
}

fn options() -> EquivOptions {
    EquivOptions {
        size_bound: SIZE_BOUND,
        fuel: FUEL,
        ..EquivOptions::default()
    }
}

fn suite(report: suites::Report, minimum: usize) -> Outcome {
    let detail = report.to_string();
    if report.passed() && report.instances >= minimum {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_6() -> Outcome {
    timed(SUITE_LIMIT, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        suite(
            suites::computational_confluence(&mut rng, CONFLUENCE_INSTANCES, &options()),
            CONFLUENCE_INSTANCES,
        )
    })
}

fn criterion_7() -> Outcome {
    timed(SUITE_LIMIT, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
        suite(
            suites::affine_confluence(&mut rng, AFFINE_INSTANCES, FUEL),
            AFFINE_INSTANCES,
        )
    })
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let parts = [
        (
            "substitution",
            suites::substitution_commutes(&mut rng, SUBSTITUTION_INSTANCES),
        ),
        (
            "step",
            suites::step_commutes_with_substitution(&mut rng, SUBSTITUTION_INSTANCES),
        ),
        (
            "affine",
            suites::affine_substitution(&mut rng, SUBSTITUTION_INSTANCES),
        ),
    ];
    let ok = parts
        .iter()
        .all(|(_, r)| r.passed() && r.instances >= SUBSTITUTION_INSTANCES);
    let detail: Vec<String> = parts.iter().map(|(n, r)| format!("{n}: {r}")).collect();
    Outcome {
        pass: ok,
        detail: detail.join("; "),
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut ok = true;
    let mut detail = Vec::new();
    for pair in CriticalPair::ALL {
        let r = suites::critical_pair(&mut rng, pair, PAIR_INSTANCES, &options());
        ok &= r.passed() && r.instances >= PAIR_INSTANCES;
        detail.push(format!("{}: {r}", pair.name()));
    }
    Outcome {
        pass: ok,
        detail: detail.join("; "),
    }
}

fn criterion_10() -> Outcome {
    // The free `y` of the endpoints is instantiated at 𝔹 → 𝔹 → 𝔹.
    let ty = Type::arrow(
        Type::curried([Type::Bool, Type::Bool], Type::Bool),
        Type::Bool,
    );
    match comp_equiv(&dup_halves(), &dup_quarters(), &ty, &options()) {
        Ok(v) if !v.equivalent => {
            let c = v.failing_context.expect("a failing context");
            let (_, a, b) = v
                .per_context_results
                .iter()
                .find(|(k, _, _)| *k == c)
                .unwrap();
            pass(format!("not equivalent at {ty}; {c} gives {a} vs {b}"))
        }
        Ok(_) => fail("reported equivalent"),
        Err(e) => fail(e.to_string()),
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 the duplicated coin exploration", criterion_1),
        ("2 strategy endpoints", criterion_2),
        ("3 internalized confluence", criterion_3),
        ("4 typing verdicts", criterion_4),
        ("5 if example equivalence", criterion_5),
        ("6 computational confluence", criterion_6),
        ("7 affine confluence", criterion_7),
        ("8 substitution lemmas", criterion_8),
        ("9 critical pairs", criterion_9),
        ("10 negative control", criterion_10),
    ];
    let mut failures = Vec::new();
    for (name, run) in criteria {
        let out = run();
        println!(
            "{} criterion {name}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
        if !out.pass {
            failures.push(name);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
