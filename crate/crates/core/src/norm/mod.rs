//! Exact evaluation of the set norm `sup sum_i (s_i*(phi))^2` over pairwise disjoint members, and
//! of its weighted variant.

mod dual;
mod greedy;
pub mod packing;
mod tree_dp;

use std::fmt;

use crate::error::{Error, Result};
use crate::family::{same_ground, AtomSet, FinVector, Ground, SetFamily, WeightedSet};
use crate::rational::{decimal_sqrt, Rational};

pub use dual::{dual_eval, DecreasingL2Seq, DualCombination};
pub use greedy::{greedy_extract, k_bound, GreedyCertificate, GreedyConfig, GreedyStep};
pub use packing::{max_weight_packing, Packing, PackingItem, DEFAULT_STATE_BUDGET};
pub use tree_dp::norm_tree_dp;

pub const DEFAULT_ORACLE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Oracle,
    TreeDp,
}

impl fmt::Display for NormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMethod::Oracle => "oracle",
            NormMethod::TreeDp => "tree-dp",
        })
    }
}

/// Limits for the exhaustive routes.
#[derive(Clone, Copy, Debug)]
pub struct NormConfig {
    /// Largest support size the exhaustive search accepts.
    pub oracle_limit: usize,
    pub state_budget: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig {
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            state_budget: DEFAULT_STATE_BUDGET,
        }
    }
}

/// A squared norm together with a disjoint family attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct NormResult {
    pub norm_sq: Rational,
    /// Pairwise disjoint sets, canonically sorted.
    pub witness: Vec<AtomSet>,
    pub method: NormMethod,
}

impl NormResult {
    /// `sqrt(norm_sq)` truncated to `digits` decimals.
    pub fn norm(&self, digits: u32) -> String {
        decimal_sqrt(&self.norm_sq, digits)
    }

    /// `sum (s*(phi))^2` over the witness.
    pub fn witness_value(&self, phi: &FinVector) -> Rational {
        self.witness.iter().map(|s| square(&sum_over(s, phi))).sum()
    }
}

fn square(q: &Rational) -> Rational {
    q * q
}

fn sum_over(s: &AtomSet, phi: &FinVector) -> Rational {
    s.iter().map(|a| phi.get(a)).sum()
}

fn check_ground(ground: &Ground, phi: &FinVector) -> Result<()> {
    if same_ground(ground, phi.ground()) {
        Ok(())
    } else {
        Err(Error::GroundMismatch)
    }
}

/// `s*(phi) = sum_{a in s} phi(a)`.
pub fn functional_eval(family: &SetFamily, s: &AtomSet, phi: &FinVector) -> Result<Rational> {
    check_ground(family.ground(), phi)?;
    family.require_member(s)?;
    Ok(sum_over(s, phi))
}

/// `<phi, g> = sum_a phi(a) g(a)`.
pub fn weighted_eval(g: &WeightedSet, phi: &FinVector) -> Result<Rational> {
    check_ground(g.ground(), phi)?;
    Ok(g.weights().map(|(a, w)| w * phi.get(a)).sum())
}

fn check_support(phi: &FinVector, cfg: &NormConfig) -> Result<AtomSet> {
    let support = phi.support();
    if support.len() > cfg.oracle_limit {
        return Err(Error::resource("oracle support size", support.len() as u64, cfg.oracle_limit as u64));
    }
    Ok(support)
}

/// Exhaustive search over all pairwise disjoint subfamilies of members meeting `supp phi`.
pub fn norm_oracle(family: &SetFamily, phi: &FinVector, cfg: &NormConfig) -> Result<NormResult> {
    check_ground(family.ground(), phi)?;
    let support = check_support(phi, cfg)?;
    let items: Vec<PackingItem> = family
        .members()
        .iter()
        .filter(|m| !m.is_disjoint(&support))
        .map(|m| PackingItem {
            atoms: m.clone(),
            weight: square(&sum_over(m, phi)),
        })
        .collect();
    let packing = max_weight_packing(&items, &support, cfg.state_budget)?;
    let mut witness: Vec<AtomSet> = packing.chosen.iter().map(|&i| items[i].atoms.clone()).collect();
    witness.sort();
    Ok(NormResult {
        norm_sq: packing.value,
        witness,
        method: NormMethod::Oracle,
    })
}

/// A weighted norm value with the indices of the chosen weighted sets.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedNormResult {
    pub norm_sq: Rational,
    /// Indices into the input list, ascending.
    pub witness: Vec<usize>,
}

impl WeightedNormResult {
    pub fn norm(&self, digits: u32) -> String {
        decimal_sqrt(&self.norm_sq, digits)
    }
}

/// `sup sum_i <phi, g_i>^2` over subfamilies with pairwise disjoint supports.
pub fn norm_weighted(sets: &[WeightedSet], phi: &FinVector, cfg: &NormConfig) -> Result<WeightedNormResult> {
    for g in sets {
        check_ground(g.ground(), phi)?;
    }
    let support = check_support(phi, cfg)?;
    let items = sets
        .iter()
        .map(|g| {
            Ok(PackingItem {
                atoms: g.support(),
                weight: square(&weighted_eval(g, phi)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let packing = max_weight_packing(&items, &support, cfg.state_budget)?;
    let mut witness = packing.chosen;
    witness.sort_unstable();
    Ok(WeightedNormResult {
        norm_sq: packing.value,
        witness,
    })
}

pub(crate) fn is_pairwise_disjoint<'a>(sets: impl IntoIterator<Item = &'a AtomSet>) -> bool {
    let mut seen = std::collections::HashSet::new();
    sets.into_iter().all(|s| s.iter().all(|a| seen.insert(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{dyadic_tree, tree_segments, GroundSet, Provenance};
    use crate::rational::{int, ratio};

    fn depth_one() -> SetFamily {
        tree_segments(&dyadic_tree(1, 100).unwrap())
    }

    #[test]
    fn functional_eval_cancels_and_sums() {
        let f = depth_one();
        let g = f.ground().clone();
        let phi = FinVector::from_named(&g, [("0:0", int(1)), ("1:0", int(-1)), ("1:1", int(-1))]).unwrap();
        let s = f.member_of(&["0:0", "1:0"]).unwrap();
        assert_eq!(functional_eval(&f, &s, &phi).unwrap(), int(0));
        let a = f.member_of(&["1:1"]).unwrap();
        assert_eq!(functional_eval(&f, &a, &phi).unwrap(), int(-1));

        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        let f = SetFamily::from_names(&g, &[vec!["a", "b", "c"]], Provenance::Explicit).unwrap();
        let phi = FinVector::from_named(&g, [("a", ratio(1, 2)), ("b", ratio(1, 3)), ("c", ratio(1, 6))]).unwrap();
        assert_eq!(functional_eval(&f, f.member(0), &phi).unwrap(), int(1));
    }

    #[test]
    fn weighted_eval_examples() {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        let ab = g.set_of(&["a", "b"]).unwrap();
        let half = WeightedSet::uniform(&g, &ab, &ratio(1, 2)).unwrap();
        let phi = FinVector::from_named(&g, [("a", int(1)), ("b", int(1))]).unwrap();
        assert_eq!(weighted_eval(&half, &phi).unwrap(), int(1));
        let c = WeightedSet::uniform(&g, &g.set_of(&["c"]).unwrap(), &int(1)).unwrap();
        assert_eq!(weighted_eval(&c, &phi).unwrap(), int(0));
        let other = GroundSet::new(["a"]).unwrap();
        assert_eq!(weighted_eval(&half, &FinVector::zero(&other)).unwrap_err(), Error::GroundMismatch);
    }

    #[test]
    fn oracle_on_depth_one() {
        let f = depth_one();
        let g = f.ground().clone();
        let ones = FinVector::from_named(&g, [("0:0", int(1)), ("1:0", int(1)), ("1:1", int(1))]).unwrap();
        let r = norm_oracle(&f, &ones, &NormConfig::default()).unwrap();
        assert_eq!(r.norm_sq, int(5));
        assert_eq!(r.norm(10), "2.2360679774");
        assert_eq!(r.witness_value(&ones), r.norm_sq);
        assert_eq!(r.witness.len(), 2);
        assert!(r.witness.contains(&f.member_of(&["1:1"]).unwrap()) || r.witness.contains(&f.member_of(&["1:0"]).unwrap()));

        let alt = FinVector::from_named(&g, [("0:0", int(1)), ("1:0", int(-1)), ("1:1", int(-1))]).unwrap();
        let r = norm_oracle(&f, &alt, &NormConfig::default()).unwrap();
        assert_eq!(r.norm_sq, int(3));
        assert_eq!(r.witness.len(), 3);
    }

    #[test]
    fn oracle_on_unit_and_zero_vectors() {
        let f = depth_one();
        for a in 0..3 {
            let e = FinVector::unit(f.ground(), a).unwrap();
            assert_eq!(norm_oracle(&f, &e, &NormConfig::default()).unwrap().norm_sq, int(1));
        }
        let r = norm_oracle(&f, &FinVector::zero(f.ground()), &NormConfig::default()).unwrap();
        assert_eq!(r.norm_sq, int(0));
        assert!(r.witness.is_empty());
    }

    #[test]
    fn oracle_rejects_large_supports() {
        let f = tree_segments(&dyadic_tree(4, 100).unwrap());
        let phi = FinVector::from_indexed(f.ground(), (0..20).map(|i| (i, int(1)))).unwrap();
        assert!(norm_oracle(&f, &phi, &NormConfig::default()).unwrap_err().is_resource());
    }

    #[test]
    fn weighted_norm_prefers_singletons() {
        let g = GroundSet::new(["a", "b"]).unwrap();
        let sets = vec![
            WeightedSet::uniform(&g, &g.set_of(&["a"]).unwrap(), &int(1)).unwrap(),
            WeightedSet::uniform(&g, &g.set_of(&["b"]).unwrap(), &int(1)).unwrap(),
            WeightedSet::uniform(&g, &g.full_set(), &ratio(1, 2)).unwrap(),
        ];
        let phi = FinVector::from_named(&g, [("a", int(1)), ("b", int(1))]).unwrap();
        let r = norm_weighted(&sets, &phi, &NormConfig::default()).unwrap();
        assert_eq!(r.norm_sq, int(2));
        assert_eq!(r.witness, vec![0, 1]);

        let one = [WeightedSet::uniform(&g, &g.full_set(), &ratio(1, 3)).unwrap()];
        let chi = FinVector::from_named(&g, [("a", int(1)), ("b", int(1))]).unwrap();
        assert_eq!(norm_weighted(&one, &chi, &NormConfig::default()).unwrap().norm_sq, ratio(4, 9));
        assert_eq!(
            norm_weighted(&sets, &FinVector::zero(&g), &NormConfig::default()).unwrap().norm_sq,
            int(0)
        );
    }
}
