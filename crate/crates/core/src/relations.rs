//! Finite sets and binary relations over opaque, totally ordered identifiers.
//!
//! Everything here is a pure value: operators borrow their inputs and return
//! fresh sets. A [`Relation`] is nothing more than a [`FiniteSet`] of pairs,
//! so every set operator (union, intersection, difference, subset) applies to
//! relations unchanged.
//!
//! Elements are kept in a `BTreeSet`, so iteration and serialization follow
//! the identifier order and two equal sets always serialize identically.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A finite set with no duplicates, iterated in element order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteSet<T: Ord>(BTreeSet<T>);

/// A finite set of ordered pairs `left ↦ right`.
pub type Relation<A, B> = FiniteSet<(A, B)>;

impl<T: Ord> Default for FiniteSet<T> {
    fn default() -> Self {
        FiniteSet(BTreeSet::new())
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for FiniteSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl<T: Ord> FromIterator<T> for FiniteSet<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        FiniteSet(iter.into_iter().collect())
    }
}

impl<T: Ord> IntoIterator for FiniteSet<T> {
    type Item = T;
    type IntoIter = std::collections::btree_set::IntoIter<T>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a, T: Ord> IntoIterator for &'a FiniteSet<T> {
    type Item = &'a T;
    type IntoIter = std::collections::btree_set::Iter<'a, T>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl<T: Ord, const N: usize> From<[T; N]> for FiniteSet<T> {
    fn from(items: [T; N]) -> Self {
        FiniteSet(BTreeSet::from(items))
    }
}

impl<T: Ord> FiniteSet<T> {
    /// The empty set.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(item: T) -> Self {
        let mut set = BTreeSet::new();
        set.insert(item);
        FiniteSet(set)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: &T) -> bool {
        self.0.contains(item)
    }

    pub fn iter(&self) -> std::collections::btree_set::Iter<'_, T> {
        self.0.iter()
    }

    /// Adds `item` in place; returns whether it was absent.
    pub fn insert(&mut self, item: T) -> bool {
        self.0.insert(item)
    }

    /// Removes `item` in place; returns whether it was present.
    pub fn remove(&mut self, item: &T) -> bool {
        self.0.remove(item)
    }

    /// Keeps only the elements matching `keep`.
    pub fn retain<F: FnMut(&T) -> bool>(&mut self, keep: F) {
        self.0.retain(keep)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl<T: Ord + Clone> FiniteSet<T> {
    /// `a ∪ b`
    pub fn union(&self, other: &Self) -> Self {
        self.0.union(&other.0).cloned().collect()
    }

    /// `a ∩ b`
    pub fn intersection(&self, other: &Self) -> Self {
        self.0.intersection(&other.0).cloned().collect()
    }

    /// `a \ b`
    pub fn difference(&self, other: &Self) -> Self {
        self.0.difference(&other.0).cloned().collect()
    }

    /// `a × b`
    pub fn cartesian_product<U: Ord + Clone>(&self, other: &FiniteSet<U>) -> Relation<T, U> {
        self.iter()
            .flat_map(|a| other.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    /// The identity relation `id(S)`.
    pub fn identity(&self) -> Relation<T, T> {
        self.iter().map(|a| (a.clone(), a.clone())).collect()
    }
}

impl<A: Ord + Clone, B: Ord + Clone> FiniteSet<(A, B)> {
    pub fn contains_pair(&self, left: &A, right: &B) -> bool {
        self.0.contains(&(left.clone(), right.clone()))
    }

    pub fn dom(&self) -> FiniteSet<A> {
        self.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn ran(&self) -> FiniteSet<B> {
        self.iter().map(|(_, b)| b.clone()).collect()
    }

    /// `r⁻¹`
    pub fn inverse(&self) -> Relation<B, A> {
        self.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
    }

    /// Forward composition `r ; p = { x ↦ y | ∃z. x ↦ z ∈ r ∧ z ↦ y ∈ p }`.
    pub fn compose<C: Ord + Clone>(&self, other: &Relation<B, C>) -> Relation<A, C> {
        let mut out = BTreeSet::new();
        for (x, z) in self.iter() {
            for (z2, y) in other.iter() {
                if z == z2 {
                    out.insert((x.clone(), y.clone()));
                }
            }
        }
        FiniteSet(out)
    }

    /// Domain restriction `S ◁ r`.
    pub fn domain_restrict(&self, set: &FiniteSet<A>) -> Self {
        self.iter()
            .filter(|(a, _)| set.contains(a))
            .cloned()
            .collect()
    }

    /// Domain subtraction `S ⩤ r`.
    pub fn domain_subtract(&self, set: &FiniteSet<A>) -> Self {
        self.iter()
            .filter(|(a, _)| !set.contains(a))
            .cloned()
            .collect()
    }

    /// Range restriction `r ▷ T`.
    pub fn range_restrict(&self, set: &FiniteSet<B>) -> Self {
        self.iter()
            .filter(|(_, b)| set.contains(b))
            .cloned()
            .collect()
    }

    /// Range subtraction `r ⩥ T`.
    pub fn range_subtract(&self, set: &FiniteSet<B>) -> Self {
        self.iter()
            .filter(|(_, b)| !set.contains(b))
            .cloned()
            .collect()
    }

    /// Relational image `r[S]`.
    pub fn image(&self, set: &FiniteSet<A>) -> FiniteSet<B> {
        self.iter()
            .filter(|(a, _)| set.contains(a))
            .map(|(_, b)| b.clone())
            .collect()
    }

    /// Image of a single element, `r[{a}]`.
    pub fn image_of(&self, left: &A) -> FiniteSet<B> {
        self.iter()
            .filter(|(a, _)| a == left)
            .map(|(_, b)| b.clone())
            .collect()
    }

    /// Function application `r(a)`: the unique image of `a`, if there is one.
    pub fn apply(&self, left: &A) -> Option<B> {
        let mut hits = self.iter().filter(|(a, _)| a == left);
        let first = hits.next()?;
        match hits.next() {
            Some(_) => None,
            None => Some(first.1.clone()),
        }
    }

    /// Every left element maps to at most one right element.
    pub fn is_partial_function(&self) -> bool {
        let mut prev: Option<&A> = None;
        for (a, _) in self.iter() {
            if prev == Some(a) {
                return false;
            }
            prev = Some(a);
        }
        true
    }

    /// A partial function whose domain is exactly `domain`.
    pub fn is_total_function(&self, domain: &FiniteSet<A>) -> bool {
        self.is_partial_function() && self.dom() == *domain
    }

    /// A total function `domain → range` that is injective and onto `range`.
    pub fn is_bijection(&self, domain: &FiniteSet<A>, range: &FiniteSet<B>) -> bool {
        self.is_total_function(domain) && self.inverse().is_total_function(range)
    }
}

/// `partition(whole, parts…)`: the parts are pairwise disjoint and their union
/// is `whole`. Empty parts are allowed.
pub fn is_partition<T: Ord + Clone>(whole: &FiniteSet<T>, parts: &[&FiniteSet<T>]) -> bool {
    let mut seen = BTreeSet::new();
    for part in parts {
        for item in part.iter() {
            if !seen.insert(item) {
                return false;
            }
        }
    }
    seen.len() == whole.len() && whole.iter().all(|item| seen.contains(item))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set<const N: usize>(items: [u8; N]) -> FiniteSet<u8> {
        FiniteSet::from(items)
    }

    fn rel<const N: usize>(pairs: [(char, u8); N]) -> Relation<char, u8> {
        FiniteSet::from(pairs)
    }

    #[test]
    fn set_operators() {
        assert_eq!(set([1, 2]).union(&set([2, 3])), set([1, 2, 3]));
        assert_eq!(set([1, 2]).intersection(&set([2, 3])), set([2]));
        assert_eq!(set([1, 2]).difference(&set([2, 3])), set([1]));
        assert_eq!(set([4, 5]).difference(&FiniteSet::new()), set([4, 5]));
        let product = FiniteSet::from(['a']).cartesian_product(&FiniteSet::from(['x', 'y']));
        assert_eq!(product, FiniteSet::from([('a', 'x'), ('a', 'y')]));
    }

    #[test]
    fn composition() {
        let r = FiniteSet::from([('a', 1u8)]);
        let p = FiniteSet::from([(1u8, 'x')]);
        assert_eq!(r.compose(&p), FiniteSet::from([('a', 'x')]));
        assert!(r.compose(&Relation::<u8, char>::new()).is_empty());

        let r = FiniteSet::from([('a', 1u8), ('a', 2)]);
        let p = FiniteSet::from([(1u8, 'x'), (2, 'x')]);
        assert_eq!(r.compose(&p), FiniteSet::from([('a', 'x')]));
    }

    #[test]
    fn restriction_inverse_image() {
        let r = rel([('a', 1), ('b', 2)]);
        assert_eq!(r.inverse(), FiniteSet::from([(1, 'a'), (2, 'b')]));
        assert_eq!(r.domain_restrict(&FiniteSet::from(['a'])), rel([('a', 1)]));
        assert_eq!(r.range_restrict(&set([2])), rel([('b', 2)]));
        assert_eq!(r.domain_subtract(&FiniteSet::from(['a'])), rel([('b', 2)]));

        let r = rel([('a', 1), ('a', 2), ('b', 3)]);
        assert_eq!(r.image(&FiniteSet::from(['a'])), set([1, 2]));
        assert_eq!(r.dom(), FiniteSet::from(['a', 'b']));
        assert_eq!(r.ran(), set([1, 2, 3]));
        assert_eq!(r.apply(&'b'), Some(3));
        assert_eq!(r.apply(&'a'), None);
        assert_eq!(r.apply(&'z'), None);
    }

    #[test]
    fn function_predicates() {
        let ab = FiniteSet::from(['a', 'b']);
        assert!(rel([('a', 1), ('b', 2)]).is_bijection(&ab, &set([1, 2])));
        assert!(!rel([('a', 1), ('b', 1)]).is_bijection(&ab, &set([1])));
        assert!(!rel([('a', 1)]).is_total_function(&ab));
        assert!(rel([('a', 1), ('b', 1)]).is_total_function(&ab));
        assert!(!rel([('a', 1), ('a', 2)]).is_partial_function());
        assert!(Relation::<char, u8>::new().is_bijection(&FiniteSet::new(), &FiniteSet::new()));
    }

    #[test]
    fn partitions() {
        assert!(!is_partition(
            &set([1, 2, 3]),
            &[&set([1]), &set([2]), &set([3, 1])]
        ));
        assert!(is_partition(
            &set([1, 2, 3]),
            &[&set([1]), &set([2]), &set([3])]
        ));
        assert!(is_partition(
            &set([1, 2]),
            &[&set([1, 2]), &set([]), &set([])]
        ));
        assert!(is_partition(&set([]), &[&set([]), &set([]), &set([])]));
        assert!(!is_partition(&set([1, 2]), &[&set([1]), &set([])]));
        assert!(!is_partition(&set([1]), &[&set([1]), &set([4])]));
    }
}
