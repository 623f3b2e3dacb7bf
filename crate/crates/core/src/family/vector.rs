use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::ground::{same_ground, AtomSet, Ground};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finitely supported rational function on a ground set. Zero entries are never stored.
#[derive(Clone, Debug)]
pub struct FinVector {
    ground: Ground,
    entries: BTreeMap<u32, Rational>,
}

impl FinVector {
    pub fn zero(ground: &Ground) -> Self {
        FinVector {
            ground: ground.clone(),
            entries: BTreeMap::new(),
        }
    }

    pub fn from_indexed<I>(ground: &Ground, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, Rational)>,
    {
        let mut out = BTreeMap::new();
        for (i, v) in entries {
            if i as usize >= ground.len() {
                return Err(Error::IndexOutOfRange {
                    index: i as usize,
                    max: ground.len().saturating_sub(1),
                });
            }
            if !v.is_zero() {
                out.insert(i, v);
            }
        }
        Ok(FinVector {
            ground: ground.clone(),
            entries: out,
        })
    }

    pub fn from_named<I, S>(ground: &Ground, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: AsRef<str>,
    {
        let indexed = entries
            .into_iter()
            .map(|(a, v)| ground.require(a.as_ref()).map(|i| (i, v)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indexed(ground, indexed)
    }

    /// The basis vector `e_a`.
    pub fn unit(ground: &Ground, atom: u32) -> Result<Self> {
        Self::from_indexed(ground, [(atom, Rational::one())])
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn get(&self, atom: u32) -> Rational {
        self.entries.get(&atom).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, &Rational)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn support(&self) -> AtomSet {
        self.entries.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (*k, v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        FinVector {
            ground: self.ground.clone(),
            entries,
        }
    }

    pub fn add(&self, other: &FinVector) -> Result<Self> {
        if !same_ground(&self.ground, &other.ground) {
            return Err(Error::GroundMismatch);
        }
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            let e = entries.entry(*k).or_insert_with(Rational::zero);
            *e += v;
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(FinVector {
            ground: self.ground.clone(),
            entries,
        })
    }

    /// `sum_a phi(a)^2`, the squared Euclidean length.
    pub fn l2_sq(&self) -> Rational {
        self.entries.values().map(|v| v * v).sum()
    }

    pub fn l1(&self) -> Rational {
        self.entries.values().map(|v| v.abs()).sum()
    }

    /// Re-homes the vector on another ground set containing all of its support atoms.
    pub fn rebase(&self, ground: &Ground) -> Result<Self> {
        if same_ground(&self.ground, ground) {
            return Ok(FinVector {
                ground: ground.clone(),
                entries: self.entries.clone(),
            });
        }
        let moved = self
            .entries
            .iter()
            .map(|(k, v)| {
                let atom = self.ground.atom(*k);
                ground
                    .index_of(atom)
                    .map(|i| (i, v.clone()))
                    .ok_or(Error::GroundMismatch)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indexed(ground, moved)
    }
}

impl PartialEq for FinVector {
    fn eq(&self, other: &Self) -> bool {
        same_ground(&self.ground, &other.ground) && self.entries == other.entries
    }
}

/// A function `g: ground -> (0, 1]` of finite support, e.g. `(1/n) * chi_s`.
#[derive(Clone, Debug)]
pub struct WeightedSet {
    ground: Ground,
    weights: BTreeMap<u32, Rational>,
}

impl WeightedSet {
    pub fn new<I>(ground: &Ground, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, Rational)>,
    {
        let mut out = BTreeMap::new();
        for (i, w) in weights {
            if i as usize >= ground.len() {
                return Err(Error::IndexOutOfRange {
                    index: i as usize,
                    max: ground.len().saturating_sub(1),
                });
            }
            if !w.is_positive() || w > Rational::one() {
                return Err(Error::InvalidWeight(crate::rational::format(&w)));
            }
            out.insert(i, w);
        }
        Ok(WeightedSet {
            ground: ground.clone(),
            weights: out,
        })
    }

    /// `weight * chi_set`.
    pub fn uniform(ground: &Ground, set: &AtomSet, weight: &Rational) -> Result<Self> {
        Self::new(ground, set.iter().map(|i| (i, weight.clone())))
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn weights(&self) -> impl Iterator<Item = (u32, &Rational)> + '_ {
        self.weights.iter().map(|(k, v)| (*k, v))
    }

    pub fn weight(&self, atom: u32) -> Rational {
        self.weights.get(&atom).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> AtomSet {
        self.weights.keys().copied().collect()
    }
}

impl PartialEq for WeightedSet {
    fn eq(&self, other: &Self) -> bool {
        same_ground(&self.ground, &other.ground) && self.weights == other.weights
    }
}
