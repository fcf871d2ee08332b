//! Relational-algebra laws checked against brute-force enumeration over a
//! universe of six elements per carrier set.

use std::collections::BTreeSet;

use mhr_acl::relations::is_partition;
use mhr_acl::{FiniteSet, Relation};
use proptest::collection::btree_set;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const UNIVERSE: u8 = 6;

type Pairs = BTreeSet<(u8, u8)>;
type Elems = BTreeSet<u8>;

fn pairs() -> impl Strategy<Value = Pairs> {
    btree_set(
        (0..UNIVERSE, 0..UNIVERSE),
        0..=(UNIVERSE as usize * UNIVERSE as usize),
    )
}

/// Partial functions, which uniform pair sets almost never produce.
fn function_pairs() -> impl Strategy<Value = Pairs> {
    proptest::collection::vec(proptest::option::of(0..UNIVERSE), UNIVERSE as usize).prop_map(
        |images| {
            images
                .into_iter()
                .enumerate()
                .filter_map(|(x, y)| y.map(|y| (x as u8, y)))
                .collect()
        },
    )
}

fn elems() -> impl Strategy<Value = Elems> {
    btree_set(0..UNIVERSE, 0..=UNIVERSE as usize)
}

fn rel(p: &Pairs) -> Relation<u8, u8> {
    p.iter().copied().collect()
}

fn set(e: &Elems) -> FiniteSet<u8> {
    e.iter().copied().collect()
}

fn all() -> impl Iterator<Item = u8> + Clone {
    0..UNIVERSE
}

fn brute_pairs(mut keep: impl FnMut(u8, u8) -> bool) -> Relation<u8, u8> {
    let mut out = FiniteSet::new();
    for a in all() {
        for b in all() {
            if keep(a, b) {
                out.insert((a, b));
            }
        }
    }
    out
}

fn brute_elems(mut keep: impl FnMut(u8) -> bool) -> FiniteSet<u8> {
    all().filter(|&x| keep(x)).collect()
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

pub fn composition(cases: u32) -> Result<(), String> {
    check(cases, (pairs(), pairs()), |(r, s)| {
        let expected =
            brute_pairs(|a, c| all().any(|b| r.contains(&(a, b)) && s.contains(&(b, c))));
        prop_assert_eq!(rel(&r).compose(&rel(&s)), expected);
        Ok(())
    })
}

pub fn composition_inverse(cases: u32) -> Result<(), String> {
    check(cases, (pairs(), pairs()), |(r, s)| {
        let (r, s) = (rel(&r), rel(&s));
        prop_assert_eq!(r.compose(&s).inverse(), s.inverse().compose(&r.inverse()));
        Ok(())
    })
}

pub fn composition_associative(cases: u32) -> Result<(), String> {
    check(cases, (pairs(), pairs(), pairs()), |(r, s, t)| {
        let (r, s, t) = (rel(&r), rel(&s), rel(&t));
        prop_assert_eq!(r.compose(&s).compose(&t), r.compose(&s.compose(&t)));
        Ok(())
    })
}

pub fn inverse(cases: u32) -> Result<(), String> {
    check(cases, pairs(), |r| {
        let inv = rel(&r).inverse();
        prop_assert_eq!(&inv, &brute_pairs(|b, a| r.contains(&(a, b))));
        prop_assert_eq!(inv.inverse(), rel(&r));
        Ok(())
    })
}

pub fn domain_and_range(cases: u32) -> Result<(), String> {
    check(cases, pairs(), |r| {
        let rr = rel(&r);
        prop_assert_eq!(
            rr.dom(),
            brute_elems(|a| all().any(|b| r.contains(&(a, b))))
        );
        prop_assert_eq!(
            rr.ran(),
            brute_elems(|b| all().any(|a| r.contains(&(a, b))))
        );
        prop_assert_eq!(rr.inverse().dom(), rr.ran());
        Ok(())
    })
}

pub fn domain_restriction(cases: u32) -> Result<(), String> {
    check(cases, (pairs(), elems()), |(r, a)| {
        let (rr, aa) = (rel(&r), set(&a));
        let restricted = rr.domain_restrict(&aa);
        let subtracted = rr.domain_subtract(&aa);
        prop_assert_eq!(
            &restricted,
            &brute_pairs(|x, y| r.contains(&(x, y)) && a.contains(&x))
        );
        prop_assert_eq!(
            &subtracted,
            &brute_pairs(|x, y| r.contains(&(x, y)) && !a.contains(&x))
        );
        prop_assert_eq!(restricted.union(&subtracted), rr.clone());
        prop_assert_eq!(restricted, aa.identity().compose(&rr));
        Ok(())
    })
}

pub fn range_restriction(cases: u32) -> Result<(), String> {
    check(cases, (pairs(), elems()), |(r, b)| {
        let (rr, bb) = (rel(&r), set(&b));
        let restricted = rr.range_restrict(&bb);
        let subtracted = rr.range_subtract(&bb);
        prop_assert_eq!(
            &restricted,
            &brute_pairs(|x, y| r.contains(&(x, y)) && b.contains(&y))
        );
        prop_assert_eq!(
            &subtracted,
            &brute_pairs(|x, y| r.contains(&(x, y)) && !b.contains(&y))
        );
        prop_assert_eq!(&restricted, &rr.compose(&bb.identity()));
        prop_assert_eq!(restricted.inverse(), rr.inverse().domain_restrict(&bb));
        Ok(())
    })
}

pub fn image(cases: u32) -> Result<(), String> {
    check(cases, (pairs(), pairs(), elems()), |(r, s, a)| {
        let (rr, ss, aa) = (rel(&r), rel(&s), set(&a));
        let img = rr.image(&aa);
        prop_assert_eq!(
            &img,
            &brute_elems(|y| a.iter().any(|&x| r.contains(&(x, y))))
        );
        prop_assert_eq!(&img, &rr.domain_restrict(&aa).ran());
        prop_assert_eq!(rr.compose(&ss).image(&aa), ss.image(&img));
        for x in all() {
            prop_assert_eq!(rr.image_of(&x), rr.image(&FiniteSet::singleton(x)));
        }
        Ok(())
    })
}

pub fn set_operations(cases: u32) -> Result<(), String> {
    check(cases, (elems(), elems()), |(a, b)| {
        let (aa, bb) = (set(&a), set(&b));
        prop_assert_eq!(
            aa.union(&bb),
            brute_elems(|x| a.contains(&x) || b.contains(&x))
        );
        prop_assert_eq!(
            aa.intersection(&bb),
            brute_elems(|x| a.contains(&x) && b.contains(&x))
        );
        prop_assert_eq!(
            aa.difference(&bb),
            brute_elems(|x| a.contains(&x) && !b.contains(&x))
        );
        prop_assert_eq!(aa.is_subset(&bb), a.iter().all(|x| b.contains(x)));
        prop_assert_eq!(aa.is_disjoint(&bb), a.iter().all(|x| !b.contains(x)));
        prop_assert_eq!(
            aa.cartesian_product(&bb),
            brute_pairs(|x, y| a.contains(&x) && b.contains(&y))
        );
        Ok(())
    })
}

pub fn functions(cases: u32) -> Result<(), String> {
    let relation = prop_oneof![pairs(), function_pairs()];
    let domain = prop_oneof![elems(), Just((0..UNIVERSE).collect::<Elems>())];
    check(cases, (relation, domain, elems()), |(r, d, c)| {
        let (rr, dd, cc) = (rel(&r), set(&d), set(&c));
        let images = |x: u8| all().filter(|&y| r.contains(&(x, y))).count();
        let partial = all().all(|x| images(x) <= 1);
        let total = partial && all().all(|x| (images(x) == 1) == d.contains(&x));
        let injective = all().all(|y| all().filter(|&x| r.contains(&(x, y))).count() <= 1);
        let onto = all().all(|y| all().any(|x| r.contains(&(x, y))) == c.contains(&y));
        prop_assert_eq!(rr.is_partial_function(), partial);
        prop_assert_eq!(rr.is_total_function(&dd), total);
        prop_assert_eq!(rr.is_bijection(&dd, &cc), total && injective && onto);
        for x in all() {
            let expected = (images(x) == 1).then(|| all().find(|&y| r.contains(&(x, y))).unwrap());
            prop_assert_eq!(rr.apply(&x), expected);
        }
        Ok(())
    })
}

pub fn partition(cases: u32) -> Result<(), String> {
    let parts = proptest::collection::vec(elems(), 0..4);
    check(cases, (elems(), parts), |(whole, parts)| {
        let union: Elems = parts.iter().flatten().copied().collect();
        let disjoint = all().all(|x| parts.iter().filter(|p| p.contains(&x)).count() <= 1);
        let expected = disjoint && union == whole;
        let sets: Vec<FiniteSet<u8>> = parts.iter().map(set).collect();
        let refs: Vec<&FiniteSet<u8>> = sets.iter().collect();
        prop_assert_eq!(is_partition(&set(&whole), &refs), expected);
        Ok(())
    })
}

pub type Law = fn(u32) -> Result<(), String>;

/// Every law with its name, in a fixed order.
pub const LAWS: &[(&str, Law)] = &[
    ("composition", composition),
    ("composition_inverse", composition_inverse),
    ("composition_associative", composition_associative),
    ("inverse", inverse),
    ("domain_and_range", domain_and_range),
    ("domain_restriction", domain_restriction),
    ("range_restriction", range_restriction),
    ("image", image),
    ("set_operations", set_operations),
    ("functions", functions),
    ("partition", partition),
];
