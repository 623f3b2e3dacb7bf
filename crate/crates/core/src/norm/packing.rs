//! Exhaustive maximum-weight packing of pairwise disjoint sets.
//!
//! This is the brute-force route for the set norms: every pairwise disjoint subfamily of the
//! candidate items is enumerated implicitly by a depth-first search that, at each step, takes the
//! first still-free branch atom and either covers it with one of the items containing it or leaves
//! it uncovered. Search states are the sets of consumed atoms; they are memoized, which keeps the
//! enumeration exhaustive while collapsing repeated sub-searches.
//!
//! Branch atoms are visited in reverse depth-first preorder of the co-occurrence graph (atoms
//! adjacent when some item holds both). The order only affects how many states are visited.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::family::AtomSet;
use crate::rational::{common_denominator, scale_to, Rational};

pub const DEFAULT_STATE_BUDGET: usize = 5_000_000;

#[derive(Clone, Debug)]
pub struct PackingItem {
    pub atoms: AtomSet,
    /// Nonnegative; zero-weight items are never selected.
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packing {
    pub value: Rational,
    /// Indices into the item slice, in selection order.
    pub chosen: Vec<usize>,
    pub states: usize,
}

type Mask = Box<[u64]>;

#[derive(Clone, Copy)]
enum Choice {
    Item(usize),
    Skip,
    Done,
}

struct Search {
    masks: Vec<Mask>,
    weights: Vec<BigInt>,
    order: Vec<usize>,
    /// Items whose earliest branch position is the index.
    starting: Vec<Vec<usize>>,
    has_singleton: Vec<bool>,
    /// Atoms of items whose branch atoms all sit at or after the index.
    relevant: Vec<Mask>,
    memo: HashMap<(usize, Mask), (BigInt, Choice)>,
    budget: usize,
}

/// Maximizes the total weight of a pairwise disjoint selection of `items`.
///
/// Every positive-weight item must contain at least one atom of `branch`; the search branches
/// only on those atoms. An item is dropped when another item with the same branch atoms, fewer
/// atoms overall and at least its weight exists, since swapping never hurts.
pub fn max_weight_packing(items: &[PackingItem], branch: &AtomSet, state_budget: usize) -> Result<Packing> {
    let live = undominated(items, branch);
    if live.is_empty() {
        return Ok(Packing {
            value: Rational::zero(),
            chosen: Vec::new(),
            states: 0,
        });
    }
    debug_assert!(live.iter().all(|&i| !items[i].atoms.is_disjoint(branch)));

    let mut atoms: Vec<u32> = live.iter().flat_map(|&i| items[i].atoms.iter()).collect();
    atoms.sort_unstable();
    atoms.dedup();
    let local: HashMap<u32, usize> = atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let words = atoms.len().div_ceil(64);
    let empty = || vec![0u64; words].into_boxed_slice();

    let masks: Vec<Mask> = live
        .iter()
        .map(|&i| {
            let mut m = empty();
            for a in items[i].atoms.iter() {
                set_bit(&mut m, local[&a]);
            }
            m
        })
        .collect();
    let denom = common_denominator(live.iter().map(|&i| &items[i].weight));
    let weights: Vec<BigInt> = live.iter().map(|&i| scale_to(&items[i].weight, &denom)).collect();

    let order: Vec<usize> = visit_order(&atoms, &live.iter().map(|&i| &items[i].atoms).collect::<Vec<_>>())
        .into_iter()
        .filter(|a| branch.contains(*a))
        .map(|a| local[&a])
        .collect();
    let mut position = vec![usize::MAX; atoms.len()];
    for (p, &a) in order.iter().enumerate() {
        position[a] = p;
    }

    let mut starting: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    let mut has_singleton = vec![false; order.len()];
    for (k, &i) in live.iter().enumerate() {
        let first = items[i]
            .atoms
            .iter()
            .map(|a| position[local[&a]])
            .min()
            .expect("items are nonempty");
        starting[first].push(k);
        if items[i].atoms.len() == 1 {
            has_singleton[first] = true;
        }
    }
    // Canonical item order inside each bucket.
    for bucket in &mut starting {
        bucket.sort_by(|&x, &y| items[live[x]].atoms.cmp(&items[live[y]].atoms));
    }
    let mut relevant = vec![empty(); order.len() + 1];
    for p in (0..order.len()).rev() {
        let mut m = relevant[p + 1].clone();
        for &k in &starting[p] {
            or_into(&mut m, &masks[k]);
        }
        relevant[p] = m;
    }

    let mut search = Search {
        masks,
        weights,
        order,
        starting,
        has_singleton,
        relevant,
        memo: HashMap::new(),
        budget: state_budget,
    };
    let best = search.solve(&empty(), 0)?;

    let mut chosen = Vec::new();
    let mut state = empty();
    let mut pos = 0;
    while let Some(q) = search.first_free(&state, pos) {
        let key = (q, search.key(&state, q));
        match search.memo[&key].1 {
            Choice::Done => break,
            Choice::Skip => set_bit(&mut state, search.order[q]),
            Choice::Item(k) => {
                chosen.push(live[k]);
                or_into(&mut state, &search.masks[k]);
            }
        }
        pos = q + 1;
    }

    Ok(Packing {
        value: Rational::new(best, denom),
        chosen,
        states: search.memo.len(),
    })
}

/// Positive-weight items that no smaller item with the same branch atoms dominates.
fn undominated(items: &[PackingItem], branch: &AtomSet) -> Vec<usize> {
    let mut groups: HashMap<AtomSet, Vec<usize>> = HashMap::new();
    for (i, it) in items.iter().enumerate() {
        if it.weight.is_positive() {
            groups.entry(it.atoms.intersection(branch)).or_default().push(i);
        }
    }
    let mut live: Vec<usize> = groups
        .values()
        .flat_map(|g| {
            g.iter().copied().filter(move |&i| {
                !g.iter().any(|&j| {
                    j != i
                        && items[j].atoms.len() < items[i].atoms.len()
                        && items[j].atoms.is_subset(&items[i].atoms)
                        && items[j].weight >= items[i].weight
                })
            })
        })
        .collect();
    live.sort_unstable();
    live
}

fn set_bit(m: &mut [u64], bit: usize) {
    m[bit / 64] |= 1 << (bit % 64);
}

fn or_into(m: &mut [u64], other: &[u64]) {
    for (w, o) in m.iter_mut().zip(other) {
        *w |= o;
    }
}

impl Search {
    fn is_used(&self, state: &[u64], local: usize) -> bool {
        state[local / 64] & (1 << (local % 64)) != 0
    }

    /// Positions where no item starts only admit leaving the atom uncovered, so they are passed over.
    fn first_free(&self, state: &[u64], from: usize) -> Option<usize> {
        (from..self.order.len()).find(|&p| !self.starting[p].is_empty() && !self.is_used(state, self.order[p]))
    }

    fn key(&self, state: &[u64], p: usize) -> Mask {
        state.iter().zip(self.relevant[p].iter()).map(|(s, r)| s & r).collect()
    }

    fn solve(&mut self, state: &Mask, from: usize) -> Result<BigInt> {
        let Some(p) = self.first_free(state, from) else {
            return Ok(BigInt::zero());
        };
        let key = (p, self.key(state, p));
        if let Some((v, _)) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if self.memo.len() >= self.budget {
            return Err(Error::resource("packing search states", self.memo.len() as u64 + 1, self.budget as u64));
        }
        let mut best: Option<(BigInt, Choice)> = None;
        for idx in 0..self.starting[p].len() {
            let k = self.starting[p][idx];
            if self.masks[k].iter().zip(state.iter()).any(|(m, s)| m & s != 0) {
                continue;
            }
            let mut next = state.clone();
            or_into(&mut next, &self.masks[k]);
            let v = self.solve(&next, p + 1)? + &self.weights[k];
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, Choice::Item(k)));
            }
        }
        // Leaving the atom uncovered reaches the same state as its singleton, with less weight.
        if !self.has_singleton[p] {
            let mut next = state.clone();
            set_bit(&mut next, self.order[p]);
            let v = self.solve(&next, p + 1)?;
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, Choice::Skip));
            }
        }
        let (v, c) = best.unwrap_or((BigInt::zero(), Choice::Done));
        self.memo.insert(key, (v.clone(), c));
        Ok(v)
    }
}

/// Reverse depth-first preorder of the co-occurrence graph on `atoms`, neighbors visited in
/// canonical order, components started from their smallest atom.
fn visit_order(atoms: &[u32], sets: &[&AtomSet]) -> Vec<u32> {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for s in sets {
        for a in s.iter() {
            adj.entry(a).or_default().extend(s.iter().filter(|&b| b != a));
        }
    }
    for v in adj.values_mut() {
        v.sort_unstable();
        v.dedup();
    }
    let mut seen = std::collections::HashSet::new();
    let mut pre = Vec::with_capacity(atoms.len());
    for &root in atoms {
        if !seen.insert(root) {
            continue;
        }
        pre.push(root);
        // Explicit stack of (node, next neighbor index).
        let mut stack = vec![(root, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            let nbrs = adj.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            if let Some(off) = nbrs[i..].iter().position(|w| !seen.contains(w)) {
                let w = nbrs[i + off];
                top.1 = i + off + 1;
                seen.insert(w);
                pre.push(w);
                stack.push((w, 0));
            } else {
                stack.pop();
            }
        }
    }
    pre.reverse();
    pre
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn item(atoms: &[u32], w: i64) -> PackingItem {
        PackingItem {
            atoms: AtomSet::from_indices(atoms.to_vec()),
            weight: int(w),
        }
    }

    #[test]
    fn picks_best_disjoint_pair() {
        let items = vec![item(&[0, 1], 5), item(&[1, 2], 5), item(&[0], 1), item(&[2], 3)];
        let p = max_weight_packing(&items, &AtomSet::from_indices(vec![0, 1, 2]), 1000).unwrap();
        assert_eq!(p.value, int(8));
        let mut c = p.chosen.clone();
        c.sort();
        assert_eq!(c, vec![0, 3]);
    }

    #[test]
    fn zero_weights_are_ignored() {
        let items = vec![item(&[0], 0), item(&[1], 0)];
        let p = max_weight_packing(&items, &AtomSet::from_indices(vec![0, 1]), 10).unwrap();
        assert_eq!(p.value, int(0));
        assert!(p.chosen.is_empty());
    }

    #[test]
    fn uncovered_atoms_allowed_without_singletons() {
        // Only the pair is available; best is the pair itself.
        let items = vec![item(&[0, 1], 2), item(&[1, 2], 7)];
        let p = max_weight_packing(&items, &AtomSet::from_indices(vec![0, 1, 2]), 100).unwrap();
        assert_eq!(p.value, int(7));
        assert_eq!(p.chosen, vec![1]);
    }

    #[test]
    fn budget_is_enforced() {
        let items: Vec<PackingItem> = (0..10).map(|i| item(&[i, i + 1], 1)).collect();
        let branch = AtomSet::from_indices((0..11).collect());
        assert!(matches!(
            max_weight_packing(&items, &branch, 3),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn visit_order_is_reverse_preorder_on_a_chain_of_sets() {
        let sets = [AtomSet::from_indices(vec![0, 1]), AtomSet::from_indices(vec![1, 2])];
        let refs: Vec<&AtomSet> = sets.iter().collect();
        assert_eq!(visit_order(&[0, 1, 2], &refs), vec![2, 1, 0]);
    }
}
