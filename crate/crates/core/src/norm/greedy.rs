//! Greedy extraction of disjoint members on which many vectors of the unit ball stay large.
//!
//! A member `s` is selected when `s*(phi_n) > epsilon` for at least a fixed fraction of the
//! surviving indices; the survivors are then restricted to those indices. Every survivor then has
//! norm above `epsilon * sqrt(#chosen)`, so unit vectors allow at most `k_bound - 1` selections.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{norm_oracle, sum_over, NormConfig};
use crate::error::{Error, Result};
use crate::family::{AtomSet, FinVector, SetFamily};
use crate::rational::{format, ratio, Rational};

#[derive(Clone, Debug)]
pub struct GreedyConfig {
    /// Required share of survivors, in `(0, 1]`.
    pub fraction: Rational,
    /// Verify `||phi_n|| <= 1` with the oracle whenever the support fits its limit.
    pub check_unit_ball: bool,
    pub norm: NormConfig,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig {
            fraction: ratio(1, 2),
            check_unit_ball: true,
            norm: NormConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyStep {
    pub set: AtomSet,
    /// Indices surviving after this selection.
    pub survivors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyCertificate {
    pub epsilon: Rational,
    pub chosen_sets: Vec<AtomSet>,
    pub surviving_indices: Vec<usize>,
    pub k_bound: u64,
    pub steps: Vec<GreedyStep>,
    /// Indices whose unit-ball membership was assumed rather than checked.
    pub unverified: Vec<usize>,
}

/// The smallest `n` with `epsilon^2 * n > 1`.
pub fn k_bound(epsilon: &Rational) -> Result<u64> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidEpsilon(format(epsilon)));
    }
    let inv = (epsilon * epsilon).recip();
    let floor: BigInt = inv.numer().div_floor(inv.denom());
    let n = floor + BigInt::one();
    u64::try_from(n).map_err(|_| Error::InvalidEpsilon(format(epsilon)))
}

pub fn greedy_extract(
    family: &SetFamily,
    phis: &[FinVector],
    epsilon: &Rational,
    cfg: &GreedyConfig,
) -> Result<GreedyCertificate> {
    let k = k_bound(epsilon)?;
    if !cfg.fraction.is_positive() || cfg.fraction > Rational::one() {
        return Err(Error::InvalidParams(format!("fraction {} outside (0, 1]", format(&cfg.fraction))));
    }
    let mut unverified = Vec::new();
    for (i, phi) in phis.iter().enumerate() {
        if !crate::family::same_ground(family.ground(), phi.ground()) {
            return Err(Error::GroundMismatch);
        }
        if !cfg.check_unit_ball {
            continue;
        }
        if phi.support().len() > cfg.norm.oracle_limit {
            unverified.push(i);
            continue;
        }
        let r = norm_oracle(family, phi, &cfg.norm)?;
        if r.norm_sq > Rational::one() {
            return Err(Error::NotInUnitBall {
                index: i,
                norm_sq: format(&r.norm_sq),
            });
        }
    }

    let mut survivors: Vec<usize> = (0..phis.len()).collect();
    let mut chosen: Vec<AtomSet> = Vec::new();
    let mut steps = Vec::new();
    while (chosen.len() as u64) < k {
        let need = required(&cfg.fraction, survivors.len());
        let pick = family
            .members()
            .iter()
            .filter(|s| chosen.iter().all(|c| c.is_disjoint(s)))
            .find_map(|s| {
                let hits: Vec<usize> = survivors
                    .iter()
                    .copied()
                    .filter(|&n| sum_over(s, &phis[n]) > *epsilon)
                    .collect();
                (hits.len() >= need).then(|| (s.clone(), hits))
            });
        let Some((s, hits)) = pick else { break };
        survivors = hits;
        chosen.push(s.clone());
        steps.push(GreedyStep {
            set: s,
            survivors: survivors.clone(),
        });
    }

    Ok(GreedyCertificate {
        epsilon: epsilon.clone(),
        chosen_sets: chosen,
        surviving_indices: survivors,
        k_bound: k,
        steps,
        unverified,
    })
}

/// `max(1, ceil(fraction * len))`.
fn required(fraction: &Rational, len: usize) -> usize {
    let x = fraction * Rational::from_integer(BigInt::from(len));
    let c: BigInt = x.ceil().to_integer();
    let c = usize::try_from(c).unwrap_or(usize::MAX);
    c.max(1)
}

impl GreedyCertificate {
    /// Re-checks disjointness, the selection bound and the per-step thresholds.
    pub fn verify(&self, phis: &[FinVector]) -> bool {
        let disjoint = super::is_pairwise_disjoint(self.chosen_sets.iter());
        let bounded = self.chosen_sets.len() as u64 <= self.k_bound;
        let steps_ok = self.steps.iter().all(|st| {
            st.survivors
                .iter()
                .all(|&n| sum_over(&st.set, &phis[n]) > self.epsilon)
        });
        let tail = self
            .steps
            .last()
            .is_none_or(|st| st.survivors == self.surviving_indices);
        disjoint && bounded && steps_ok && tail && !self.epsilon.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{dyadic_tree, tree_segments};
    use crate::rational::int;

    #[test]
    fn k_bound_examples() {
        assert_eq!(k_bound(&ratio(1, 2)).unwrap(), 5);
        assert_eq!(k_bound(&int(1)).unwrap(), 2);
        assert_eq!(k_bound(&int(2)).unwrap(), 1);
        assert_eq!(k_bound(&ratio(1, 3)).unwrap(), 10);
        assert!(matches!(k_bound(&int(0)), Err(Error::InvalidEpsilon(_))));
        assert!(matches!(k_bound(&ratio(-1, 2)), Err(Error::InvalidEpsilon(_))));
    }

    #[test]
    fn zero_vectors_keep_every_index() {
        let f = tree_segments(&dyadic_tree(2, 100).unwrap());
        let phis = vec![FinVector::zero(f.ground()); 4];
        let c = greedy_extract(&f, &phis, &ratio(1, 2), &GreedyConfig::default()).unwrap();
        assert!(c.chosen_sets.is_empty());
        assert_eq!(c.surviving_indices, vec![0, 1, 2, 3]);
        assert_eq!(c.k_bound, 5);
    }

    #[test]
    fn unit_vectors_pick_their_atom() {
        let f = tree_segments(&dyadic_tree(1, 100).unwrap());
        let phis: Vec<FinVector> = [0u32, 0, 0, 2]
            .iter()
            .map(|&a| FinVector::unit(f.ground(), a).unwrap())
            .collect();
        let c = greedy_extract(&f, &phis, &ratio(1, 2), &GreedyConfig::default()).unwrap();
        assert_eq!(c.chosen_sets.len(), 1);
        assert_eq!(c.surviving_indices, vec![0, 1, 2]);
        assert!(c.verify(&phis));
    }

    #[test]
    fn vectors_outside_the_ball_are_rejected() {
        let f = tree_segments(&dyadic_tree(1, 100).unwrap());
        let phis = vec![FinVector::from_indexed(f.ground(), [(0, int(2))]).unwrap()];
        assert!(matches!(
            greedy_extract(&f, &phis, &ratio(1, 2), &GreedyConfig::default()),
            Err(Error::NotInUnitBall { index: 0, .. })
        ));
    }

    #[test]
    fn required_share() {
        assert_eq!(required(&ratio(1, 2), 0), 1);
        assert_eq!(required(&ratio(1, 2), 5), 3);
        assert_eq!(required(&ratio(1, 2), 4), 2);
        assert_eq!(required(&int(1), 4), 4);
    }
}
