//! Bottom-up dynamic program for the segment-family norm of a tree or forest.
//!
//! Every node keeps a frontier of `(completed, open)` pairs: `open` is the sum of the chain whose
//! top is the node (still allowed to grow upward) and `completed` is the sum of squares of every
//! closed chain below. Pairs are merged only when their open sums coincide.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{NormMethod, NormResult};
use crate::error::Result;
use crate::family::{same_ground, AtomSet, FinVector, FiniteTree};
use crate::rational::{common_denominator, scale_to, Rational};

#[derive(Clone, Debug)]
enum Back {
    Start,
    Extend { child: u32, key: BigInt },
}

type Frontier = BTreeMap<BigInt, (BigInt, Back)>;

/// The norm of `phi` with respect to all segments of `tree`.
pub fn norm_tree_dp(tree: &FiniteTree, phi: &FinVector) -> Result<NormResult> {
    let phi = if same_ground(tree.ground(), phi.ground()) {
        phi.clone()
    } else {
        phi.rebase(tree.ground())?
    };
    let values: Vec<Rational> = phi.entries().map(|(_, v)| v.clone()).collect();
    let denom = common_denominator(values.iter());
    let weight = |v: u32| scale_to(&phi.get(v), &denom);
    solve(tree, &weight, &denom)
}

fn insert(f: &mut Frontier, open: BigInt, comp: BigInt, back: Back) {
    match f.get(&open) {
        Some((c, _)) if *c >= comp => {}
        _ => {
            f.insert(open, (comp, back));
        }
    }
}

fn solve(tree: &FiniteTree, weight: &dyn Fn(u32) -> BigInt, denom: &BigInt) -> Result<NormResult> {
    let n = tree.len();
    let mut frontier: Vec<Frontier> = vec![Frontier::new(); n];
    let mut closed: Vec<(BigInt, BigInt)> = vec![(BigInt::zero(), BigInt::zero()); n];
    let mut order = tree.preorder();
    order.reverse();
    for &v in &order {
        let kids = tree.children(v);
        let base: BigInt = kids.iter().map(|&c| &closed[c as usize].1).sum();
        let own = weight(v);
        let mut f = Frontier::new();
        insert(&mut f, own.clone(), base.clone(), Back::Start);
        for &c in kids {
            let rest = &base - &closed[c as usize].1;
            for (o, (comp, _)) in &frontier[c as usize] {
                insert(
                    &mut f,
                    &own + o,
                    &rest + comp,
                    Back::Extend {
                        child: c,
                        key: o.clone(),
                    },
                );
            }
        }
        closed[v as usize] = f
            .iter()
            .map(|(o, (comp, _))| (o.clone(), comp + o * o))
            .max_by(|x, y| x.1.cmp(&y.1))
            .expect("frontier always holds the trivial chain");
        frontier[v as usize] = f;
    }

    let total: BigInt = tree.roots().iter().map(|&r| &closed[r as usize].1).sum();

    // Each work item places node `v` with open key `key` on chain `chain`.
    let mut chains: Vec<Vec<u32>> = Vec::new();
    let mut work: Vec<(u32, BigInt, usize)> = Vec::new();
    for &r in tree.roots() {
        chains.push(Vec::new());
        work.push((r, closed[r as usize].0.clone(), chains.len() - 1));
    }
    while let Some((v, key, chain)) = work.pop() {
        chains[chain].push(v);
        let (_, back) = &frontier[v as usize][&key];
        let through = match back {
            Back::Start => None,
            Back::Extend { child, key } => {
                work.push((*child, key.clone(), chain));
                Some(*child)
            }
        };
        for &c in tree.children(v) {
            if Some(c) != through {
                chains.push(Vec::new());
                work.push((c, closed[c as usize].0.clone(), chains.len() - 1));
            }
        }
    }
    let mut witness: Vec<AtomSet> = chains
        .into_iter()
        .filter(|c| !c.iter().map(|&v| weight(v)).sum::<BigInt>().is_zero())
        .map(AtomSet::from_indices)
        .collect();
    witness.sort();

    Ok(NormResult {
        norm_sq: Rational::new(total, denom * denom),
        witness,
        method: NormMethod::TreeDp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{dyadic_tree, GroundSet};
    use crate::rational::int;

    #[test]
    fn whole_path_is_one_segment() {
        let t = FiniteTree::path(&["a", "b", "c"]).unwrap();
        let phi = FinVector::from_named(t.ground(), [("a", int(1)), ("b", int(1)), ("c", int(1))]).unwrap();
        let r = norm_tree_dp(&t, &phi).unwrap();
        assert_eq!(r.norm_sq, int(9));
        assert_eq!(r.witness, vec![t.ground().full_set()]);
        assert_eq!(r.method, NormMethod::TreeDp);
    }

    #[test]
    fn depth_one_all_ones() {
        let t = dyadic_tree(1, 100).unwrap();
        let phi = FinVector::from_indexed(t.ground(), (0..3).map(|i| (i, int(1)))).unwrap();
        let r = norm_tree_dp(&t, &phi).unwrap();
        assert_eq!(r.norm_sq, int(5));
        assert_eq!(r.witness_value(&phi), int(5));
    }

    #[test]
    fn zero_vector() {
        let t = dyadic_tree(2, 100).unwrap();
        let r = norm_tree_dp(&t, &FinVector::zero(t.ground())).unwrap();
        assert_eq!(r.norm_sq, int(0));
        assert!(r.witness.is_empty());
    }

    #[test]
    fn signed_path_uses_sign_changes() {
        // a<b<c<d with 2, -3, 3, 3: {a}, {b}, {c,d} give 4 + 9 + 36; the whole path gives 25.
        let t = FiniteTree::path(&["a", "b", "c", "d"]).unwrap();
        let phi = FinVector::from_named(
            t.ground(),
            [("a", int(2)), ("b", int(-3)), ("c", int(3)), ("d", int(3))],
        )
        .unwrap();
        let r = norm_tree_dp(&t, &phi).unwrap();
        assert_eq!(r.norm_sq, int(49));
        assert_eq!(r.witness_value(&phi), int(49));
        assert_eq!(r.witness.len(), 3);
    }

    #[test]
    fn vector_on_foreign_ground_is_rebased() {
        let t = FiniteTree::path(&["a", "b"]).unwrap();
        let g = GroundSet::new(["b"]).unwrap();
        let phi = FinVector::from_named(&g, [("b", int(3))]).unwrap();
        assert_eq!(norm_tree_dp(&t, &phi).unwrap().norm_sq, int(9));
        let bad = GroundSet::new(["z"]).unwrap();
        let phi = FinVector::from_named(&bad, [("z", int(3))]).unwrap();
        assert!(norm_tree_dp(&t, &phi).is_err());
    }
}
