use lambcoin_core::{
    dist_eq, parse_closed, redexes, CalculusVariant, Distribution, Rational, Strategy, Term,
};
use lambcoin_testkit::{probability, raw_term};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A distribution over a few small closed terms, drawn from a seed.
fn dist(seed: u64) -> Distribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4);
    let mut rest = Rational::one();
    let mut pairs = Vec::new();
    for i in 0..n {
        let t = raw_term(&mut rng, 0, 5);
        let p = if i + 1 == n {
            rest.clone()
        } else {
            &rest * &probability(&mut rng)
        };
        rest = &rest - &p;
        pairs.push((p, t));
    }
    Distribution::from_pairs(pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn combine_flattens(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), w in any::<u64>()) {
        let (da, db, dc) = (dist(a), dist(b), dist(c));
        let mut rng = ChaCha8Rng::seed_from_u64(w);
        let (p, q) = (probability(&mut rng), probability(&mut rng));
        let inner = Distribution::combine(&[(p.clone(), da.clone()), (p.complement(), db.clone())]).unwrap();
        let nested = Distribution::combine(&[(q.clone(), inner), (q.complement(), dc.clone())]).unwrap();
        let flat = Distribution::combine(&[
            (&q * &p, da),
            (&q * &p.complement(), db),
            (q.complement(), dc),
        ])
        .unwrap();
        prop_assert_eq!(&nested, &flat);
        prop_assert!(nested.mass().is_one());
    }

    #[test]
    fn dist_eq_is_an_equivalence(a in any::<u64>(), b in any::<u64>()) {
        let (da, db) = (dist(a), dist(b));
        prop_assert!(dist_eq(&da, &da));
        prop_assert_eq!(dist_eq(&da, &db), dist_eq(&db, &da));
        let reversed = Distribution::from_pairs(
            da.iter().map(|(t, p)| (p.clone(), t.clone())).collect::<Vec<_>>().into_iter().rev(),
        )
        .unwrap();
        prop_assert!(dist_eq(&da, &reversed));
        prop_assert!(dist_eq(&da, &dist(a)));
    }

    #[test]
    fn lift_step_preserves_mass(a in any::<u64>(), pick in any::<u64>()) {
        let d = dist(a);
        for variant in [CalculusVariant::Plain, CalculusVariant::Internalized] {
            let stepped = d
                .lift_step(|t| {
                    let rs = redexes(t);
                    rs.get(pick as usize % rs.len().max(1)).cloned()
                }, variant)
                .unwrap();
            prop_assert!(stepped.mass().is_one());
            prop_assert!(stepped.iter().all(|(_, p)| p.is_positive()));
        }
    }
}

#[test]
fn renamed_supports_are_equal() {
    let t = |s: &str| parse_closed(s, CalculusVariant::Plain).unwrap();
    let a = Distribution::from_pairs([
        (Rational::new(1, 3), t("\\x. x")),
        (Rational::new(2, 3), t("0")),
    ])
    .unwrap();
    let b = Distribution::from_pairs([
        (Rational::new(2, 3), t("0")),
        (Rational::new(1, 3), t("\\y. y")),
    ])
    .unwrap();
    assert!(dist_eq(&a, &b));
    assert_eq!(a.canonical(), "{ 2/3: 0 ; 1/3: \\x0. x0 }");
}

#[test]
fn strategy_lift_on_duplicated_coin() {
    let t: Term = parse_closed("(\\x.\\y. y x x) coin", CalculusVariant::Plain).unwrap();
    let d = Distribution::dirac(t);
    let step = |d: &Distribution| {
        d.lift_step(
            |u| lambcoin_core::select_redex(u, Strategy::CallByName),
            CalculusVariant::Plain,
        )
        .unwrap()
    };
    let d = step(&step(&step(&d)));
    assert_eq!(d.len(), 4);
    assert!(d.iter().all(|(_, p)| *p == Rational::new(1, 4)));
}
