use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite ground set of opaque atoms.
///
/// Atoms are strings ordered lexicographically; the ground set stores them sorted, so atom
/// indices agree with the atom order and sorted index lists are in canonical order.
#[derive(Clone)]
pub struct GroundSet {
    atoms: Vec<String>,
    index: HashMap<String, u32>,
}

/// Ground sets are shared between families, vectors and trees.
pub type Ground = Arc<GroundSet>;

impl GroundSet {
    pub fn new<I, S>(atoms: I) -> Result<Ground>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::EmptyGround);
        }
        atoms.sort();
        if let Some(w) = atoms.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateAtom(w[0].clone()));
        }
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i as u32))
            .collect();
        Ok(Arc::new(GroundSet { atoms, index }))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom(&self, i: u32) -> &str {
        &self.atoms[i as usize]
    }

    pub fn index_of(&self, atom: &str) -> Option<u32> {
        self.index.get(atom).copied()
    }

    pub fn require(&self, atom: &str) -> Result<u32> {
        self.index_of(atom)
            .ok_or_else(|| Error::UnknownAtom(atom.to_string()))
    }

    pub fn contains(&self, atom: &str) -> bool {
        self.index.contains_key(atom)
    }

    /// Builds an [`AtomSet`] from atom names; duplicates collapse.
    pub fn set_of<S: AsRef<str>>(&self, atoms: &[S]) -> Result<AtomSet> {
        atoms
            .iter()
            .map(|a| self.require(a.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(AtomSet::from_indices)
    }

    pub fn names(&self, set: &AtomSet) -> Vec<String> {
        set.iter().map(|i| self.atom(i).to_string()).collect()
    }

    pub fn full_set(&self) -> AtomSet {
        AtomSet((0..self.atoms.len() as u32).collect())
    }
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for GroundSet {}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("GroundSet").field(&self.atoms).finish()
    }
}

pub fn same_ground(a: &Ground, b: &Ground) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A subset of a ground set, as a sorted list of atom indices.
///
/// The derived order is lexicographic on the index lists, which is the canonical member order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet(Vec<u32>);

impl AtomSet {
    pub fn empty() -> Self {
        AtomSet(Vec::new())
    }

    pub fn singleton(i: u32) -> Self {
        AtomSet(vec![i])
    }

    pub fn from_indices(mut idx: Vec<u32>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        AtomSet(idx)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn min(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        self.0.iter().all(|x| it.any(|y| y == x))
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.iter().copied().filter(|x| other.contains(*x)).collect())
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.iter().copied().filter(|x| !other.contains(*x)).collect())
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        AtomSet::from_indices(v)
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<u32> for AtomSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        AtomSet::from_indices(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_is_sorted_and_rejects_duplicates() {
        let g = GroundSet::new(["c", "a", "b"]).unwrap();
        assert_eq!(g.atoms(), ["a", "b", "c"]);
        assert_eq!(g.index_of("b"), Some(1));
        assert_eq!(
            GroundSet::new(["a", "a"]).unwrap_err(),
            Error::DuplicateAtom("a".into())
        );
        assert_eq!(
            GroundSet::new(Vec::<String>::new()).unwrap_err(),
            Error::EmptyGround
        );
    }

    #[test]
    fn atom_set_ops() {
        let a = AtomSet::from_indices(vec![3, 1, 2]);
        let b = AtomSet::from_indices(vec![2, 5]);
        assert_eq!(a.as_slice(), &[1, 2, 3]);
        assert_eq!(a.intersection(&b).as_slice(), &[2]);
        assert_eq!(a.difference(&b).as_slice(), &[1, 3]);
        assert_eq!(a.union(&b).as_slice(), &[1, 2, 3, 5]);
        assert!(!a.is_disjoint(&b));
        assert!(AtomSet::singleton(5).is_subset(&b));
        assert!(!b.is_subset(&a));
        assert!(AtomSet::empty().is_subset(&a));
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let a = AtomSet::from_indices(vec![0]);
        let ab = AtomSet::from_indices(vec![0, 1]);
        let b = AtomSet::from_indices(vec![1]);
        let mut v = vec![b.clone(), ab.clone(), a.clone()];
        v.sort();
        assert_eq!(v, vec![a, ab, b]);
    }
}
