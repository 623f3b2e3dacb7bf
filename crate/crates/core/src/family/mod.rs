//! Ground sets, finite vectors, set families and trees.

mod ground;
mod partition;
mod tree;
mod vector;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ground::{same_ground, AtomSet, Ground, GroundSet};
pub use partition::Partition;
pub use tree::{branches_and_tails, dyadic_atom, dyadic_tree, tree_segments, FiniteTree, DEFAULT_NODE_LIMIT};
pub use vector::{FinVector, WeightedSet};

/// Where a family came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Explicit,
    TreeSegments,
    BranchesTails,
    Admissible,
    Reznichenko,
    Eberleinized,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Explicit => "explicit",
            Provenance::TreeSegments => "tree-segments",
            Provenance::BranchesTails => "branches-tails",
            Provenance::Admissible => "admissible",
            Provenance::Reznichenko => "reznichenko",
            Provenance::Eberleinized => "eberleinized",
        };
        f.write_str(s)
    }
}

/// An explicit finite family of nonempty subsets of a ground set, kept in canonical order.
#[derive(Clone)]
pub struct SetFamily {
    ground: Ground,
    members: Vec<AtomSet>,
    index: HashMap<AtomSet, usize>,
    provenance: Provenance,
}

impl SetFamily {
    /// Builds a family; duplicate members collapse. With `with_singletons`, every singleton of the
    /// ground set is added.
    pub fn new<I>(ground: &Ground, members: I, provenance: Provenance, with_singletons: bool) -> Result<Self>
    where
        I: IntoIterator<Item = AtomSet>,
    {
        let mut all: Vec<AtomSet> = Vec::new();
        for m in members {
            if m.is_empty() {
                return Err(Error::EmptyMember);
            }
            if let Some(bad) = m.iter().find(|&i| i as usize >= ground.len()) {
                return Err(Error::IndexOutOfRange {
                    index: bad as usize,
                    max: ground.len() - 1,
                });
            }
            all.push(m);
        }
        if with_singletons {
            all.extend((0..ground.len() as u32).map(AtomSet::singleton));
        }
        all.sort();
        all.dedup();
        let index = all.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Ok(SetFamily {
            ground: ground.clone(),
            members: all,
            index,
            provenance,
        })
    }

    /// Strict constructor from atom names: duplicates and unknown atoms are errors.
    pub fn from_names<S: AsRef<str>>(
        ground: &Ground,
        members: &[Vec<S>],
        provenance: Provenance,
    ) -> Result<Self> {
        let sets = members
            .iter()
            .map(|m| ground.set_of(m))
            .collect::<Result<Vec<_>>>()?;
        let family = Self::new(ground, sets.iter().cloned(), provenance, false)?;
        if family.len() != sets.len() {
            let mut seen = std::collections::HashSet::new();
            let dup = sets.into_iter().find(|s| !seen.insert(s.clone())).unwrap();
            return Err(Error::DuplicateMember(ground.names(&dup)));
        }
        Ok(family)
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn members(&self) -> &[AtomSet] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &AtomSet {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn position(&self, set: &AtomSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn contains(&self, set: &AtomSet) -> bool {
        self.index.contains_key(set)
    }

    pub fn require_member(&self, set: &AtomSet) -> Result<usize> {
        self.position(set)
            .ok_or_else(|| Error::UnknownMember(self.ground.names(set)))
    }

    pub fn names(&self, set: &AtomSet) -> Vec<String> {
        self.ground.names(set)
    }

    /// Parses a member given by atom names.
    pub fn member_of<S: AsRef<str>>(&self, atoms: &[S]) -> Result<AtomSet> {
        let set = self.ground.set_of(atoms)?;
        self.require_member(&set)?;
        Ok(set)
    }

    /// The first atom (in canonical order) whose singleton is missing.
    pub fn missing_singleton(&self) -> Option<u32> {
        (0..self.ground.len() as u32).find(|&i| !self.contains(&AtomSet::singleton(i)))
    }

    pub fn without_member(&self, i: usize) -> SetFamily {
        let members = self
            .members
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, m)| m.clone());
        SetFamily::new(&self.ground, members, self.provenance, false).expect("subfamily of a valid family")
    }

    pub fn with_members<I: IntoIterator<Item = AtomSet>>(&self, extra: I) -> Result<SetFamily> {
        SetFamily::new(
            &self.ground,
            self.members.iter().cloned().chain(extra),
            self.provenance,
            false,
        )
    }

    /// Indices of the members contained in `set`.
    pub fn members_within(&self, set: &AtomSet) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| self.members[i].is_subset(set))
            .collect()
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let named: Vec<Vec<String>> = self.members.iter().map(|m| self.names(m)).collect();
        f.debug_struct("SetFamily")
            .field("provenance", &self.provenance)
            .field("members", &named)
            .finish()
    }
}

impl PartialEq for SetFamily {
    fn eq(&self, other: &Self) -> bool {
        same_ground(&self.ground, &other.ground)
            && self.provenance == other.provenance
            && self.members == other.members
    }
}

/// The trace set `L_s = { s ∩ t : t in family }`, deduplicated and canonically sorted. May contain
/// the empty set.
pub fn trace_set(family: &SetFamily, s: &AtomSet) -> Result<Vec<AtomSet>> {
    family.require_member(s)?;
    let mut out: Vec<AtomSet> = family.members().iter().map(|t| s.intersection(t)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_family() -> SetFamily {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        SetFamily::from_names(
            &g,
            &[
                vec!["a"],
                vec!["b"],
                vec!["c"],
                vec!["a", "b"],
                vec!["b", "c"],
                vec!["a", "b", "c"],
            ],
            Provenance::TreeSegments,
        )
        .unwrap()
    }

    #[test]
    fn trace_of_full_path_is_every_segment_plus_empty() {
        let f = path_family();
        let s = f.member_of(&["a", "b", "c"]).unwrap();
        let l = trace_set(&f, &s).unwrap();
        assert_eq!(l.len(), 6);
        assert!(l.contains(&s));
        let f2 = f.without_member(0);
        let l2 = trace_set(&f2, &f2.member_of(&["c"]).unwrap()).unwrap();
        assert_eq!(l2.len(), 2);
        assert!(l2[0].is_empty());
    }

    #[test]
    fn trace_of_singleton() {
        let f = path_family();
        let s = f.member_of(&["a"]).unwrap();
        let l = trace_set(&f, &s).unwrap();
        assert_eq!(l, vec![AtomSet::empty(), s]);
    }

    #[test]
    fn disjoint_family_traces() {
        let g = GroundSet::new(["a", "b", "c", "d"]).unwrap();
        let f = SetFamily::from_names(&g, &[vec!["a", "b"], vec!["c"], vec!["d"]], Provenance::Explicit).unwrap();
        for m in f.members() {
            assert_eq!(trace_set(&f, m).unwrap(), vec![AtomSet::empty(), m.clone()]);
        }
    }

    #[test]
    fn trace_of_non_member_is_error() {
        let f = path_family();
        let s = f.ground().set_of(&["a", "c"]).unwrap();
        assert!(matches!(trace_set(&f, &s), Err(Error::UnknownMember(_))));
    }

    #[test]
    fn strict_constructor_rejects_bad_members() {
        let g = GroundSet::new(["a", "b"]).unwrap();
        assert_eq!(
            SetFamily::from_names(&g, &[vec!["a"], vec!["a"]], Provenance::Explicit).unwrap_err(),
            Error::DuplicateMember(vec!["a".into()])
        );
        assert_eq!(
            SetFamily::from_names::<&str>(&g, &[vec![]], Provenance::Explicit).unwrap_err(),
            Error::EmptyMember
        );
        assert!(SetFamily::from_names(&g, &[vec!["q"]], Provenance::Explicit).is_err());
    }

    #[test]
    fn singleton_flag() {
        let g = GroundSet::new(["a", "b"]).unwrap();
        let f = SetFamily::new(&g, [], Provenance::Explicit, true).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.missing_singleton(), None);
        let f = SetFamily::new(&g, [AtomSet::singleton(1)], Provenance::Explicit, false).unwrap();
        assert_eq!(f.missing_singleton(), Some(0));
    }
}
