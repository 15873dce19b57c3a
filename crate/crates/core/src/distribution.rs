//! Exact finite probability distributions over terms.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rewrite::{is_normal, step_at, CalculusVariant, Position, RewriteError};
use crate::syntax::{pretty, Rational, Term};

/// A finite map from terms to strictly positive probabilities summing to 1.
///
/// Terms are nameless, so alpha-equivalent terms share a key and are
/// merged on construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution {
    support: BTreeMap<Term, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistributionError {
    /// Weights of a convex combination are not positive or do not sum to 1.
    Weight(String),
    /// A redex choice for `lift_step` does not name a redex of its term.
    InvalidChoice {
        term: Term,
        position: Option<Position>,
    },
}

impl fmt::Display for DistributionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionError::Weight(msg) => write!(f, "invalid weights: {msg}"),
            DistributionError::InvalidChoice {
                term,
                position: Some(p),
            } => {
                write!(f, "position {p} is not a redex of `{term}`")
            }
            DistributionError::InvalidChoice {
                term,
                position: None,
            } => {
                write!(f, "no redex chosen for non-normal term `{term}`")
            }
        }
    }
}

impl core::error::Error for DistributionError {}

impl Distribution {
    pub fn dirac(t: Term) -> Self {
        let mut support = BTreeMap::new();
        support.insert(t, Rational::one());
        Distribution { support }
    }

    /// Builds a distribution from weighted terms, merging equal keys.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (Rational, Term)>,
    ) -> Result<Self, DistributionError> {
        let mut support: BTreeMap<Term, Rational> = BTreeMap::new();
        for (p, t) in pairs {
            if !p.is_positive() {
                return Err(DistributionError::Weight(alloc::format!(
                    "probability {p} of `{t}` is not positive"
                )));
            }
            add_mass(&mut support, t, p);
        }
        let total: Rational = support.values().sum();
        if !total.is_one() {
            return Err(DistributionError::Weight(alloc::format!(
                "total mass is {total}, not 1"
            )));
        }
        Ok(Distribution { support })
    }

    /// Convex combination `sum_i w_i * d_i`.
    pub fn combine(parts: &[(Rational, Distribution)]) -> Result<Self, DistributionError> {
        if parts.is_empty() {
            return Err(DistributionError::Weight("no parts".into()));
        }
        if let Some((w, _)) = parts.iter().find(|(w, _)| !w.is_positive()) {
            return Err(DistributionError::Weight(alloc::format!(
                "weight {w} is not positive"
            )));
        }
        let total: Rational = parts.iter().map(|(w, _)| w).sum();
        if !total.is_one() {
            return Err(DistributionError::Weight(alloc::format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self::combine_unchecked(parts.iter().map(|(w, d)| (w, d))))
    }

    /// Convex combination without weight validation; callers guarantee
    /// positive weights summing to 1.
    pub(crate) fn combine_unchecked<'a>(
        parts: impl IntoIterator<Item = (&'a Rational, &'a Distribution)>,
    ) -> Self {
        let mut support = BTreeMap::new();
        for (w, d) in parts {
            for (t, p) in &d.support {
                add_mass(&mut support, t.clone(), w * p);
            }
        }
        let d = Distribution { support };
        debug_assert!(d.mass().is_one());
        d
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Rational)> {
        self.support.iter()
    }

    pub fn probability(&self, t: &Term) -> Rational {
        self.support.get(t).cloned().unwrap_or_default()
    }

    pub fn mass(&self) -> Rational {
        self.support.values().sum()
    }

    pub fn is_dirac(&self) -> bool {
        self.support.len() == 1
    }

    /// True when every support term is a normal form.
    pub fn is_normal(&self) -> bool {
        self.support.keys().all(is_normal)
    }

    /// `d[r/x]`: substitutes into every support term and re-merges.
    pub fn substitute(&self, x: usize, r: &Term) -> Self {
        let mut support = BTreeMap::new();
        for (t, p) in &self.support {
            add_mass(&mut support, t.substitute(x, r), p.clone());
        }
        Distribution { support }
    }

    /// Fires one redex in every non-normal support term, chosen by
    /// `choice`; normal terms are kept.
    pub fn lift_step(
        &self,
        mut choice: impl FnMut(&Term) -> Option<Position>,
        variant: CalculusVariant,
    ) -> Result<Self, DistributionError> {
        let mut support = BTreeMap::new();
        for (t, p) in &self.support {
            if is_normal(t) {
                add_mass(&mut support, t.clone(), p.clone());
                continue;
            }
            let pos = choice(t);
            let invalid = || DistributionError::InvalidChoice {
                term: t.clone(),
                position: pos.clone(),
            };
            let Some(at) = &pos else {
                return Err(invalid());
            };
            let out = step_at(t, at, variant).map_err(|e| match e {
                RewriteError::NotARedex(_) | RewriteError::BadPosition(_) => invalid(),
            })?;
            for (q, r) in out.into_outcomes() {
                add_mass(&mut support, r, p * &q);
            }
        }
        let d = Distribution { support };
        debug_assert!(d.mass().is_one());
        Ok(d)
    }

    /// Support pairs in canonical order: sorted by pretty-printed term.
    pub fn canonical_entries(&self) -> Vec<(String, &Rational)> {
        let mut entries: Vec<_> = self.support.iter().map(|(t, p)| (pretty(t), p)).collect();
        entries.sort();
        entries
    }

    /// The canonical text form `{ p1: t1 ; p2: t2 }`.
    pub fn canonical(&self) -> String {
        let mut out = String::from("{ ");
        for (i, (t, p)) in self.canonical_entries().into_iter().enumerate() {
            if i > 0 {
                out.push_str(" ; ");
            }
            out.push_str(&alloc::format!("{p}: {t}"));
        }
        out.push_str(" }");
        out
    }
}

fn add_mass(support: &mut BTreeMap<Term, Rational>, t: Term, p: Rational) {
    match support.get_mut(&t) {
        Some(q) => *q = &*q + &p,
        None => {
            support.insert(t, p);
        }
    }
}

/// Distribution equality `~`: same support up to alpha with identical
/// probabilities.
pub fn dist_eq(d1: &Distribution, d2: &Distribution) -> bool {
    d1 == d2
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Sorts distributions by their canonical text.
pub fn sort_canonical(ds: &mut [Distribution]) {
    ds.sort_by_cached_key(Distribution::canonical);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_closed};
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn t(s: &str) -> Term {
        parse_closed(s, CalculusVariant::Plain).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn dist(pairs: &[(Rational, &str)]) -> Distribution {
        Distribution::from_pairs(pairs.iter().map(|(p, s)| (p.clone(), t(s)))).unwrap()
    }

    #[test]
    fn dirac_distributions() {
        assert_eq!(Distribution::dirac(Term::Zero).canonical(), "{ 1: 0 }");
        let d = Distribution::dirac(t("\\y. y coin coin"));
        assert_eq!(d.canonical(), "{ 1: \\x0. x0 coin coin }");
        let d = Distribution::dirac(Term::Coin);
        assert!(d.is_dirac() && !d.is_normal());
    }

    #[test]
    fn combine_examples() {
        let left = Distribution::combine(&[
            (r(1, 2), dist(&[(r(1, 1), "\\y. y 0 0")])),
            (r(1, 2), dist(&[(r(1, 1), "\\y. y 1 1")])),
        ])
        .unwrap();
        assert_eq!(
            left,
            dist(&[(r(1, 2), "\\y. y 0 0"), (r(1, 2), "\\y. y 1 1")])
        );

        let same = Distribution::combine(&[
            (r(1, 2), Distribution::dirac(Term::Zero)),
            (r(1, 2), Distribution::dirac(Term::Zero)),
        ])
        .unwrap();
        assert_eq!(same, Distribution::dirac(Term::Zero));
    }

    #[test]
    fn combine_overlapping_supports() {
        let (a, b, c) = ("\\x. x", "0", "1");
        let got = Distribution::combine(&[
            (r(1, 2), dist(&[(r(1, 2), a), (r(1, 2), b)])),
            (r(1, 2), dist(&[(r(1, 2), b), (r(1, 2), c)])),
        ])
        .unwrap();
        // Independent summation over the flattened weighted list.
        let flat = [(r(1, 4), a), (r(1, 4), b), (r(1, 4), b), (r(1, 4), c)];
        let mut expected: BTreeMap<Term, Rational> = BTreeMap::new();
        for (p, s) in flat {
            let e = expected.entry(t(s)).or_default();
            *e = &*e + &p;
        }
        for (term, p) in &expected {
            assert_eq!(&got.probability(term), p);
        }
        assert_eq!(got.len(), expected.len());
        assert_eq!(got.probability(&t(b)), r(1, 2));
    }

    #[test]
    fn combine_rejects_bad_weights() {
        let d = Distribution::dirac(Term::Zero);
        assert!(matches!(
            Distribution::combine(&[(r(1, 2), d.clone())]),
            Err(DistributionError::Weight(_))
        ));
        assert!(Distribution::combine(&[(r(3, 2), d.clone()), (r(-1, 2), d.clone())]).is_err());
        assert!(Distribution::combine(&[]).is_err());
        assert!(Distribution::from_pairs([(r(1, 2), Term::Zero)]).is_err());
        assert!(Distribution::from_pairs([(r(0, 1), Term::One), (r(1, 1), Term::Zero)]).is_err());
    }

    #[test]
    fn equality_is_order_and_alpha_insensitive() {
        let left = dist(&[(r(1, 2), "\\y. y 0 0"), (r(1, 2), "\\y. y 1 1")]);
        let rev = dist(&[(r(1, 2), "\\y. y 1 1"), (r(1, 2), "\\y. y 0 0")]);
        assert!(dist_eq(&left, &rev));
        let a = dist(&[(r(1, 2), "\\x. x"), (r(1, 2), "0")]);
        let b = dist(&[(r(1, 2), "\\y. y"), (r(1, 2), "0")]);
        assert!(dist_eq(&a, &b));
        let quarter = dist(&[
            (r(1, 4), "\\y. y 0 0"),
            (r(1, 4), "\\y. y 0 1"),
            (r(1, 4), "\\y. y 1 0"),
            (r(1, 4), "\\y. y 1 1"),
        ]);
        assert!(!dist_eq(&left, &quarter));
    }

    #[test]
    fn substitution_into_distributions() {
        let x = parse("x", CalculusVariant::Plain).unwrap().term;
        let d = Distribution::from_pairs([(r(1, 2), x.clone()), (r(1, 2), Term::Zero)]).unwrap();
        assert_eq!(
            d.substitute(0, &Term::Zero),
            Distribution::dirac(Term::Zero)
        );

        let ite = parse("if x then 0 else 1", CalculusVariant::Plain)
            .unwrap()
            .term;
        let d = Distribution::from_pairs([(r(1, 2), ite.clone()), (r(1, 2), x)]).unwrap();
        let got = d.substitute(0, &Term::One);
        let expected = Distribution::from_pairs([
            (r(1, 2), ite.substitute(0, &Term::One)),
            (r(1, 2), Term::One),
        ])
        .unwrap();
        assert_eq!(got, expected);
        assert_eq!(
            got,
            dist(&[(r(1, 2), "if 1 then 0 else 1"), (r(1, 2), "1")])
        );
    }

    #[test]
    fn lift_step_duplicated_coin_left_path() {
        let start = Distribution::dirac(t("(\\x.\\y. y x x) coin"));
        let arg: Position = "arg".parse().unwrap();
        let d1 = start
            .lift_step(|_| Some(arg.clone()), CalculusVariant::Plain)
            .unwrap();
        assert_eq!(
            d1,
            dist(&[
                (r(1, 2), "(\\x.\\y. y x x) 0"),
                (r(1, 2), "(\\x.\\y. y x x) 1")
            ])
        );
        let d2 = d1
            .lift_step(|_| Some(Position::root()), CalculusVariant::Plain)
            .unwrap();
        assert_eq!(
            d2,
            dist(&[(r(1, 2), "\\y. y 0 0"), (r(1, 2), "\\y. y 1 1")])
        );
        assert!(d2.mass().is_one());
    }

    #[test]
    fn lift_step_fixpoint_and_errors() {
        let d = Distribution::dirac(Term::Zero);
        assert_eq!(d.lift_step(|_| None, CalculusVariant::Plain).unwrap(), d);

        let d = Distribution::dirac(Term::Coin);
        let err = d.lift_step(|_| None, CalculusVariant::Plain).unwrap_err();
        assert!(matches!(
            err,
            DistributionError::InvalidChoice { position: None, .. }
        ));
        let err = d
            .lift_step(|_| Some("fun".parse().unwrap()), CalculusVariant::Plain)
            .unwrap_err();
        assert!(matches!(
            err,
            DistributionError::InvalidChoice {
                position: Some(_),
                ..
            }
        ));
    }

    #[test]
    fn canonical_text_is_sorted_by_term_text() {
        let d = dist(&[(r(1, 4), "1"), (r(3, 4), "0")]);
        assert_eq!(d.canonical(), "{ 3/4: 0 ; 1/4: 1 }");
        let mut ds = vec![d.clone(), Distribution::dirac(Term::Zero)];
        sort_canonical(&mut ds);
        assert_eq!(ds[0].canonical(), "{ 1: 0 }");
    }
}
