use std::collections::BTreeSet;

use lambcoin_core::{
    check_probabilistic_confluence, is_normal, normal_form_distributions, parse_closed, redexes,
    reduce_with_strategy, step_at, stuck_oplus, CalculusVariant, Discipline, Distribution,
    Strategy, Term,
};
use lambcoin_testkit::{closed_program, raw_term, suites, Config};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FUEL: u64 = 200_000;

/// Unmemoized reference: the normal-form distributions of `t`, by direct
/// recursion over every redex and every choice in every outcome.
fn naive(t: &Term, variant: CalculusVariant) -> BTreeSet<Distribution> {
    if is_normal(t) {
        return BTreeSet::from([Distribution::dirac(t.clone())]);
    }
    let mut all = BTreeSet::new();
    for pos in redexes(t) {
        let outcomes = step_at(t, &pos, variant).unwrap().into_outcomes();
        let mut partial = vec![Vec::new()];
        for (p, ti) in &outcomes {
            let options = naive(ti, variant);
            partial = partial
                .into_iter()
                .flat_map(|prefix: Vec<(lambcoin_core::Rational, Distribution)>| {
                    options.iter().map(move |d| {
                        let mut next = prefix.clone();
                        next.push((p.clone(), d.clone()));
                        next
                    })
                })
                .collect();
        }
        for parts in partial {
            all.insert(Distribution::combine(&parts).unwrap());
        }
    }
    all
}

fn simply_typed_of_size(seed: u64, max_size: usize) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    closed_program(&mut rng, Config::new(Discipline::Simple, max_size), 2).0
}

fn simply_typed(seed: u64) -> Term {
    simply_typed_of_size(seed, 12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn memo_matches_naive(seed in any::<u64>()) {
        // The oracle is exponential in the number of coins.
        let t = simply_typed_of_size(seed, 9);
        for variant in [CalculusVariant::Plain, CalculusVariant::Internalized] {
            let fast: BTreeSet<Distribution> =
                normal_form_distributions(&t, variant, FUEL).unwrap().into_iter().collect();
            prop_assert_eq!(fast, naive(&t, variant), "{}", t);
        }
    }

    #[test]
    fn strategy_endpoints_are_reachable(seed in any::<u64>()) {
        let t = simply_typed(seed);
        let all = normal_form_distributions(&t, CalculusVariant::Plain, FUEL).unwrap();
        for s in [Strategy::CallByName, Strategy::CallByValue] {
            let trace = reduce_with_strategy(&t, s, CalculusVariant::Plain, FUEL).unwrap();
            prop_assert!(all.contains(trace.terminal()), "{} under {:?}", t, s);
        }
    }

    #[test]
    fn results_are_normal_with_unit_mass(seed in any::<u64>()) {
        let t = simply_typed(seed);
        for d in normal_form_distributions(&t, CalculusVariant::Plain, FUEL).unwrap() {
            prop_assert!(d.is_normal());
            prop_assert!(d.mass().is_one());
        }
    }

    #[test]
    fn internalized_is_confluent_without_stuck_sums(seed in any::<u64>()) {
        let t = simply_typed(seed);
        let all = normal_form_distributions(&t, CalculusVariant::Internalized, FUEL).unwrap();
        let stuck = all.iter().any(|d| d.iter().any(|(u, _)| !stuck_oplus(u).is_empty()));
        if !stuck {
            prop_assert_eq!(all.len(), 1, "{}", t);
        }
    }
}

#[test]
fn memo_matches_naive_on_raw_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 300 {
        let t = raw_term(&mut rng, 0, 12);
        // Untyped terms may diverge; keep the ones that terminate quickly.
        let Ok(fast) = normal_form_distributions(&t, CalculusVariant::Plain, 2_000) else {
            continue;
        };
        checked += 1;
        assert_eq!(
            fast.into_iter().collect::<BTreeSet<_>>(),
            naive(&t, CalculusVariant::Plain),
            "{t}"
        );
    }
}

#[test]
fn affine_terms_are_confluent() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let report = suites::affine_confluence(&mut rng, 200, FUEL);
    assert!(report.passed(), "{report}");
}

#[test]
fn duplicated_coin_is_not_confluent() {
    let t = parse_closed("(\\x.\\y. y x x) coin", CalculusVariant::Plain).unwrap();
    let r = check_probabilistic_confluence(&t, CalculusVariant::Plain, FUEL).unwrap();
    assert!(!r.confluent);
    assert_eq!(r.final_distributions.len(), 2);
    let r = check_probabilistic_confluence(&t, CalculusVariant::Internalized, FUEL).unwrap();
    assert!(r.confluent);
}
