//! Admissible subsets of a finite sequence grid, their strata, the quasi-Eberlein partition
//! search, Eberleinization and the saturation partition.

mod qe;
mod saturation;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::family::{AtomSet, Ground, GroundSet, Provenance, SetFamily, WeightedSet};
use crate::rational::ratio;

pub use qe::{qe_partition_search, QePartitionWitness};
pub use saturation::{saturation_partition, SaturationBlock, SaturationResult};

pub const DEFAULT_GRID_LIMIT: u64 = 4096;
pub const DEFAULT_FAMILY_LIMIT: u64 = 1_000_000;

/// Stratum index per member.
pub type Strata = BTreeMap<AtomSet, u32>;

/// All sequences in `{0..B-1}^L`. Atom names are digit strings, dot-separated when `B > 10`.
#[derive(Clone, Debug)]
pub struct SeqGrid {
    base: u32,
    length: u32,
    ground: Ground,
    digits: Vec<Vec<u32>>,
}

impl SeqGrid {
    pub fn new(base: u32, length: u32, limit: u64) -> Result<Self> {
        if base < 2 || length < 1 {
            return Err(Error::InvalidParams(format!("grid needs B >= 2 and L >= 1, got B={base}, L={length}")));
        }
        let size = (base as u64).checked_pow(length).filter(|&n| n <= limit);
        let Some(size) = size else {
            let needed = BigUint::from(base).pow(length).to_u128().unwrap_or(u128::MAX);
            return Err(Error::resource("grid elements", needed, limit));
        };
        let seqs: Vec<Vec<u32>> = (0..size)
            .map(|mut i| {
                let mut d = vec![0; length as usize];
                for slot in d.iter_mut().rev() {
                    *slot = (i % base as u64) as u32;
                    i /= base as u64;
                }
                d
            })
            .collect();
        let name = |d: &[u32]| {
            let parts: Vec<String> = d.iter().map(u32::to_string).collect();
            parts.join(if base > 10 { "." } else { "" })
        };
        let ground = GroundSet::new(seqs.iter().map(|d| name(d)))?;
        let mut digits = vec![Vec::new(); seqs.len()];
        for d in seqs {
            let i = ground.index_of(&name(&d)).expect("atom was just inserted");
            digits[i as usize] = d;
        }
        Ok(SeqGrid {
            base,
            length,
            ground,
            digits,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn digits(&self, atom: u32) -> &[u32] {
        &self.digits[atom as usize]
    }

    /// First position (1-based) where two distinct sequences differ.
    pub fn first_difference(&self, a: u32, b: u32) -> Option<u32> {
        self.digits(a)
            .iter()
            .zip(self.digits(b))
            .position(|(x, y)| x != y)
            .map(|p| p as u32 + 1)
    }

    fn atom_of(&self, digits: &[u32]) -> u32 {
        let name: Vec<String> = digits.iter().map(u32::to_string).collect();
        let name = name.join(if self.base > 10 { "." } else { "" });
        self.ground.index_of(&name).expect("digits lie in the grid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Characteristic {
    /// Sets with at most one element.
    Any,
    Exactly(u32),
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Characteristic::Any => f.write_str("any"),
            Characteristic::Exactly(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleSet {
    pub members: AtomSet,
    pub characteristic: Characteristic,
}

/// Two pairs whose first differences disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityViolation {
    pub first: (u32, u32, u32),
    pub second: (u32, u32, u32),
}

impl AdmissibilityViolation {
    pub fn describe(&self, grid: &SeqGrid) -> String {
        let g = grid.ground();
        format!(
            "pair ({}, {}) first differs at {} but pair ({}, {}) at {}",
            g.atom(self.first.0),
            g.atom(self.first.1),
            self.first.2,
            g.atom(self.second.0),
            g.atom(self.second.1),
            self.second.2
        )
    }
}

pub fn is_admissible(grid: &SeqGrid, set: &AtomSet) -> Result<std::result::Result<AdmissibleSet, AdmissibilityViolation>> {
    if let Some(bad) = set.iter().find(|&a| a as usize >= grid.ground().len()) {
        return Err(Error::IndexOutOfRange {
            index: bad as usize,
            max: grid.ground().len() - 1,
        });
    }
    let atoms = set.as_slice();
    let mut first: Option<(u32, u32, u32)> = None;
    for (i, &a) in atoms.iter().enumerate() {
        for &b in &atoms[i + 1..] {
            let n = grid.first_difference(a, b).expect("distinct atoms differ");
            match first {
                None => first = Some((a, b, n)),
                Some(f) if f.2 != n => {
                    return Ok(Err(AdmissibilityViolation {
                        first: f,
                        second: (a, b, n),
                    }))
                }
                Some(_) => {}
            }
        }
    }
    Ok(Ok(AdmissibleSet {
        members: set.clone(),
        characteristic: first.map_or(Characteristic::Any, |f| Characteristic::Exactly(f.2)),
    }))
}

/// Number of admissible sets with `2..=max_size` elements.
fn count_large(grid: &SeqGrid, max_size: u32) -> BigUint {
    let b = grid.base;
    let mut total = BigUint::from(0u32);
    for n in 1..=grid.length {
        let prefixes = BigUint::from(b).pow(n - 1);
        let per_digit = BigUint::from(b).pow(grid.length - n);
        let mut per_prefix = BigUint::from(0u32);
        let mut binom = BigUint::from(1u32);
        for k in 1..=max_size.min(b) {
            binom = binom * BigUint::from(b - k + 1) / BigUint::from(k);
            if k >= 2 {
                per_prefix += &binom * per_digit.pow(k);
            }
        }
        total += prefixes * per_prefix;
    }
    total
}

/// Every admissible set with at most `max_size` elements (singletons included), stratified by
/// characteristic. Singletons are placed in stratum 1.
pub fn admissible_family(grid: &SeqGrid, max_size: u32, family_limit: u64) -> Result<(SetFamily, Strata)> {
    if max_size == 0 {
        return Err(Error::InvalidParams("max_size must be at least 1".into()));
    }
    let size = count_large(grid, max_size) + BigUint::from(grid.ground().len());
    if size > BigUint::from(family_limit) {
        return Err(Error::resource("admissible family size", size.to_u128().unwrap_or(u128::MAX), family_limit));
    }

    let mut strata = Strata::new();
    for a in 0..grid.ground().len() as u32 {
        strata.insert(AtomSet::singleton(a), 1);
    }
    let b = grid.base;
    let l = grid.length;
    for n in 1..=l {
        let prefixes = (b as u64).pow(n - 1);
        let suffixes = (b as u64).pow(l - n);
        for p in 0..prefixes {
            let prefix = to_digits(p, b, n - 1);
            let mut digits: Vec<u32> = Vec::new();
            choose_digits(b, max_size.min(b), 0, &mut digits, &mut |ds| {
                if ds.len() < 2 {
                    return;
                }
                let mut pick = vec![0u64; ds.len()];
                loop {
                    let set: AtomSet = ds
                        .iter()
                        .zip(&pick)
                        .map(|(&d, &s)| {
                            let mut full = prefix.clone();
                            full.push(d);
                            full.extend(to_digits(s, b, l - n));
                            grid.atom_of(&full)
                        })
                        .collect();
                    strata.insert(set, n);
                    if !advance(&mut pick, suffixes) {
                        break;
                    }
                }
            });
        }
    }
    let family = SetFamily::new(grid.ground(), strata.keys().cloned(), Provenance::Admissible, false)?;
    Ok((family, strata))
}

fn to_digits(mut v: u64, base: u32, len: u32) -> Vec<u32> {
    let mut d = vec![0; len as usize];
    for slot in d.iter_mut().rev() {
        *slot = (v % base as u64) as u32;
        v /= base as u64;
    }
    d
}

/// Calls `visit` on every increasing digit list of length at most `max`.
fn choose_digits(base: u32, max: u32, from: u32, cur: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
    visit(cur);
    if cur.len() as u32 == max {
        return;
    }
    for d in from..base {
        cur.push(d);
        choose_digits(base, max, d + 1, cur, visit);
        cur.pop();
    }
}

/// Odometer step over `{0..radix-1}^k`; false once it wraps.
fn advance(pick: &mut [u64], radix: u64) -> bool {
    for slot in pick.iter_mut().rev() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}

/// `{ (1/n) chi_s : s in stratum n }`, in the family's canonical member order.
pub fn eberleinize(family: &SetFamily, strata: &Strata) -> Result<Vec<WeightedSet>> {
    family
        .members()
        .iter()
        .map(|s| {
            let n = *strata.get(s).ok_or_else(|| Error::MissingStratum(family.names(s)))?;
            if n == 0 {
                return Err(Error::InvalidParams(format!("stratum of {:?} must be at least 1", family.names(s))));
            }
            WeightedSet::uniform(family.ground(), s, &ratio(1, n as i64))
        })
        .collect()
}

/// Strata keyed by characteristic, singletons in stratum 1.
pub fn characteristic_strata(grid: &SeqGrid, family: &SetFamily) -> Result<Strata> {
    family
        .members()
        .iter()
        .map(|s| match is_admissible(grid, s)? {
            Ok(a) => Ok((
                s.clone(),
                match a.characteristic {
                    Characteristic::Any => 1,
                    Characteristic::Exactly(n) => n,
                },
            )),
            Err(v) => Err(Error::InvalidParams(format!("member is not admissible: {}", v.describe(grid)))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn set(grid: &SeqGrid, names: &[&str]) -> AtomSet {
        grid.ground().set_of(names).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = SeqGrid::new(3, 2, DEFAULT_GRID_LIMIT).unwrap();
        assert_eq!(g.ground().len(), 9);
        assert_eq!(g.ground().atoms()[0], "00");
        assert_eq!(g.digits(5), &[1, 2]);
        let wide = SeqGrid::new(11, 1, DEFAULT_GRID_LIMIT).unwrap();
        assert!(wide.ground().contains("10"));
        let wide = SeqGrid::new(11, 2, DEFAULT_GRID_LIMIT).unwrap();
        assert!(wide.ground().contains("10.3"));
        assert!(SeqGrid::new(1, 2, DEFAULT_GRID_LIMIT).is_err());
        assert!(SeqGrid::new(2, 0, DEFAULT_GRID_LIMIT).is_err());
        assert!(SeqGrid::new(4, 7, DEFAULT_GRID_LIMIT).unwrap_err().is_resource());
    }

    #[test]
    fn admissibility_examples() {
        let g = SeqGrid::new(5, 3, DEFAULT_GRID_LIMIT).unwrap();
        let a = is_admissible(&g, &set(&g, &["123", "124"])).unwrap().unwrap();
        assert_eq!(a.characteristic, Characteristic::Exactly(3));
        let a = is_admissible(&g, &set(&g, &["123", "133", "144"])).unwrap().unwrap();
        assert_eq!(a.characteristic, Characteristic::Exactly(2));
        let v = is_admissible(&g, &set(&g, &["123", "124", "133"])).unwrap().unwrap_err();
        assert_eq!(g.ground().atom(v.first.0), "123");
        assert_eq!(g.ground().atom(v.first.1), "124");
        assert_eq!(v.first.2, 3);
        assert_eq!(g.ground().atom(v.second.1), "133");
        assert_eq!(v.second.2, 2);
        let a = is_admissible(&g, &set(&g, &["000"])).unwrap().unwrap();
        assert_eq!(a.characteristic, Characteristic::Any);
        assert_eq!(is_admissible(&g, &AtomSet::empty()).unwrap().unwrap().characteristic, Characteristic::Any);
    }

    #[test]
    fn small_families() {
        let g = SeqGrid::new(2, 1, DEFAULT_GRID_LIMIT).unwrap();
        let (f, strata) = admissible_family(&g, 2, DEFAULT_FAMILY_LIMIT).unwrap();
        assert_eq!(f.len(), 3);
        assert!(strata.values().all(|&n| n == 1));

        let g = SeqGrid::new(3, 1, DEFAULT_GRID_LIMIT).unwrap();
        let (f, _) = admissible_family(&g, 2, DEFAULT_FAMILY_LIMIT).unwrap();
        assert_eq!(f.len(), 6);
        assert_eq!(f.members().iter().filter(|m| m.len() == 2).count(), 3);

        let g = SeqGrid::new(4, 2, DEFAULT_GRID_LIMIT).unwrap();
        let (f, _) = admissible_family(&g, 1, DEFAULT_FAMILY_LIMIT).unwrap();
        assert_eq!(f.len(), 16);
        assert!(f.members().iter().all(|m| m.len() == 1));
    }

    #[test]
    fn family_count_matches_enumeration() {
        let g = SeqGrid::new(3, 3, DEFAULT_GRID_LIMIT).unwrap();
        let (f, strata) = admissible_family(&g, 3, DEFAULT_FAMILY_LIMIT).unwrap();
        assert_eq!(f.len() as u64, (count_large(&g, 3) + BigUint::from(27u32)).to_u64().unwrap());
        for m in f.members() {
            let a = is_admissible(&g, m).unwrap().unwrap();
            if let Characteristic::Exactly(n) = a.characteristic {
                assert_eq!(strata[m], n);
            }
        }
        assert!(admissible_family(&g, 3, 10).unwrap_err().is_resource());
    }

    #[test]
    fn eberleinization_scales_by_stratum() {
        let g = SeqGrid::new(2, 2, DEFAULT_GRID_LIMIT).unwrap();
        let (f, strata) = admissible_family(&g, 2, DEFAULT_FAMILY_LIMIT).unwrap();
        let e = eberleinize(&f, &strata).unwrap();
        assert_eq!(e.len(), f.len());
        let pair = set(&g, &["00", "01"]);
        let i = f.position(&pair).unwrap();
        assert_eq!(e[i].weight(pair.as_slice()[0]), ratio(1, 2));
        let single = f.position(&set(&g, &["10"])).unwrap();
        assert_eq!(e[single].weight(2), int(1));

        let mut partial = strata.clone();
        partial.remove(&pair);
        assert!(matches!(eberleinize(&f, &partial), Err(Error::MissingStratum(_))));
    }
}
