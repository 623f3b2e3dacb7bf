use std::collections::BTreeMap;
use std::fmt;

use super::ReznSystem;
use crate::error::{Error, Result};
use crate::family::{same_ground, AtomSet, Partition, Provenance, SetFamily};

pub const DEFAULT_SEGMENT_BUDGET: u64 = 5_000_000;

/// All segments of all trees. With `adjoin_ground`, every singleton of the ground set is added,
/// including points that no tree uses.
pub fn segment_family(sys: &ReznSystem, adjoin_ground: bool, budget: u64) -> Result<SetFamily> {
    let count = segment_count(sys);
    if count > budget {
        return Err(Error::resource("reznichenko segments", count, budget));
    }
    let mut members = Vec::with_capacity(count as usize);
    for t in sys.trees() {
        for v in t.nodes() {
            let mut chain = Vec::new();
            for a in t.ancestors(v) {
                chain.push(a);
                members.push(AtomSet::from_indices(chain.clone()));
            }
        }
    }
    SetFamily::new(sys.ground(), members, Provenance::Reznichenko, adjoin_ground)
}

fn segment_count(sys: &ReznSystem) -> u64 {
    sys.trees()
        .iter()
        .map(|t| t.nodes().map(|v| t.level(v).unwrap_or(0) as u64 + 1).sum::<u64>())
        .sum()
}

/// `Gamma_phi = union_i Gamma^{i, phi_i}`, the union over `i` of level `phi_i` of tree `i`.
pub fn levels_partition(sys: &ReznSystem, phi: &[u32]) -> Result<AtomSet> {
    if phi.len() > sys.trees().len() {
        return Err(Error::IndexOutOfRange {
            index: phi.len(),
            max: sys.trees().len(),
        });
    }
    let mut out: Vec<u32> = phi
        .iter()
        .zip(sys.trees())
        .flat_map(|(&k, t)| t.level_nodes(k).collect::<Vec<_>>())
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(AtomSet::from_indices(out))
}

/// Partition of the ground set by level signature: an atom's key lists `level + 1` in each tree
/// (0 when absent) up to the last tree containing it. Unused atoms share the empty key. Every
/// tree segment meets every block in at most one node.
pub fn level_signature_partition(sys: &ReznSystem) -> Partition {
    let mut blocks: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
    for a in 0..sys.ground().len() as u32 {
        let mut key: Vec<u32> = sys.trees().iter().map(|t| t.level(a).map_or(0, |l| l + 1)).collect();
        while key.last() == Some(&0) {
            key.pop();
        }
        blocks.entry(key).or_default().push(a);
    }
    let blocks = blocks.into_values().map(AtomSet::from_indices).collect();
    Partition::new(sys.ground(), blocks).expect("signatures partition the ground set")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMethod {
    GreedyFan,
    Exhaustive,
}

impl fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMethod::GreedyFan => "greedy-fan",
            SearchMethod::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReznWitness {
    pub segment: AtomSet,
    /// 1-based index of a tree in which the segment lies.
    pub tree: u32,
    pub cell: usize,
    pub count: usize,
    pub method: SearchMethod,
    /// Cells chosen by the fan, one per extension round.
    pub fan_cells: Vec<usize>,
}

impl ReznWitness {
    /// Re-checks membership, the threshold and the `gamma_d` constraint.
    pub fn verify(
        &self,
        sys: &ReznSystem,
        cells: &Partition,
        gamma_d: Option<&Partition>,
        threshold: usize,
    ) -> bool {
        let in_tree = sys.tree(self.tree).is_ok_and(|t| {
            let nodes: Vec<u32> = self.segment.iter().collect();
            nodes.iter().all(|&v| t.contains(v))
                && nodes.iter().all(|&a| nodes.iter().all(|&b| t.comparable(a, b)))
                && is_convex(t, &self.segment)
        });
        let count = self.segment.intersection(&cells.blocks()[self.cell]).len();
        let spread = gamma_d.is_none_or(|p| p.blocks().iter().all(|b| self.segment.intersection(b).len() <= 1));
        in_tree && count == self.count && count >= threshold && spread
    }
}

/// A chain is a segment when it contains every node between its ends.
fn is_convex(t: &super::ReznTree, chain: &AtomSet) -> bool {
    let Some(bottom) = chain.iter().max_by_key(|&v| t.level(v)) else {
        return false;
    };
    let path = t.ancestors(bottom);
    path.iter().take(chain.len()).all(|&v| chain.contains(v))
}

/// Looks for a segment `M` and a cell `D_i` with `#(M ∩ D_i) >= threshold`, and with
/// `#(M ∩ G) <= 1` for every block `G` of `gamma_d` when given.
///
/// First grows a fan of root chains, one per tree: each round picks the cell that the most chains
/// can step into, extends those chains by their first child in that cell and drops the rest.
/// If the fan dies out, every segment is scanned, tree by tree and bottom node by bottom node.
pub fn partition_search(
    sys: &ReznSystem,
    cells: &Partition,
    gamma_d: Option<&Partition>,
    threshold: usize,
    budget: u64,
) -> Result<Option<ReznWitness>> {
    if !same_ground(sys.ground(), cells.ground()) || gamma_d.is_some_and(|p| !same_ground(sys.ground(), p.ground())) {
        return Err(Error::InvalidPartition("partitions must cover the system's ground set".into()));
    }
    if threshold == 0 {
        return Err(Error::InvalidParams("threshold must be at least 1".into()));
    }
    let spread_ok = |chain: &[u32], extra: u32| {
        gamma_d.is_none_or(|p| chain.iter().all(|&v| p.block_of(v) != p.block_of(extra)))
    };

    // (tree, chain from root, per-cell counts)
    let mut fan: Vec<(u32, Vec<u32>, BTreeMap<usize, usize>)> = sys
        .trees()
        .iter()
        .map(|t| {
            let root = t.nodes().find(|&v| t.parent(v).is_none()).expect("trees have a root");
            (t.index(), vec![root], BTreeMap::from([(cells.block_of(root), 1)]))
        })
        .collect();
    let mut fan_cells = Vec::new();
    loop {
        if let Some(w) = fan
            .iter()
            .find_map(|(n, chain, counts)| {
                counts
                    .iter()
                    .find(|&(_, &c)| c >= threshold)
                    .map(|(&cell, &c)| (n, chain, cell, c))
            })
            .filter(|(_, chain, _, _)| gamma_d.is_none_or(|p| spread(chain, p)))
        {
            return Ok(Some(ReznWitness {
                segment: AtomSet::from_indices(w.1.clone()),
                tree: *w.0,
                cell: w.2,
                count: w.3,
                method: SearchMethod::GreedyFan,
                fan_cells,
            }));
        }
        let mut options: BTreeMap<usize, Vec<(usize, u32)>> = BTreeMap::new();
        for (i, (n, chain, _)) in fan.iter().enumerate() {
            let t = sys.tree(*n)?;
            let last = *chain.last().expect("chains are nonempty");
            let mut seen = Vec::new();
            for &c in t.children(last) {
                let cell = cells.block_of(c);
                if !seen.contains(&cell) && spread_ok(chain, c) {
                    seen.push(cell);
                    options.entry(cell).or_default().push((i, c));
                }
            }
        }
        let Some((&cell, steps)) = options.iter().max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0))) else {
            break;
        };
        fan_cells.push(cell);
        let mut next = Vec::with_capacity(steps.len());
        for &(i, c) in steps {
            let (n, mut chain, mut counts) = fan[i].clone();
            chain.push(c);
            *counts.entry(cell).or_insert(0) += 1;
            next.push((n, chain, counts));
        }
        fan = next;
    }

    let count = segment_count(sys);
    if count > budget {
        return Err(Error::resource("reznichenko segments", count, budget));
    }
    // Every segment is a run of ancestors starting at its bottom node.
    for t in sys.trees() {
        for v in t.nodes() {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            let mut blocks = std::collections::HashSet::new();
            let mut chain = Vec::new();
            for x in t.ancestors(v) {
                if gamma_d.is_some_and(|p| !blocks.insert(p.block_of(x))) {
                    break;
                }
                chain.push(x);
                let cell = cells.block_of(x);
                let c = counts.entry(cell).or_insert(0);
                *c += 1;
                if *c >= threshold {
                    return Ok(Some(ReznWitness {
                        segment: AtomSet::from_indices(chain),
                        tree: t.index(),
                        cell,
                        count: *c,
                        method: SearchMethod::Exhaustive,
                        fan_cells,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn spread(chain: &[u32], p: &Partition) -> bool {
    let mut seen = std::collections::HashSet::new();
    chain.iter().all(|&v| seen.insert(p.block_of(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reznichenko::{build, ReznParams};

    fn small() -> ReznSystem {
        build(&ReznParams {
            n_trees: 3,
            stages: 5,
            label_pool: 8,
            rng_seed: 11,
            min_request_size: 2,
        })
        .unwrap()
    }

    #[test]
    fn one_stage_segments_are_roots() {
        let sys = build(&ReznParams {
            n_trees: 4,
            stages: 1,
            label_pool: 6,
            ..ReznParams::default()
        })
        .unwrap();
        let f = segment_family(&sys, false, DEFAULT_SEGMENT_BUDGET).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.members().iter().all(|m| m.len() == 1));
        let f = segment_family(&sys, true, DEFAULT_SEGMENT_BUDGET).unwrap();
        assert_eq!(f.len(), sys.ground().len());
    }

    #[test]
    fn levels_examples() {
        let sys = small();
        let l = levels_partition(&sys, &[0]).unwrap();
        assert_eq!(sys.ground().names(&l), vec!["(0,1)"]);
        let l = levels_partition(&sys, &[0, 0]).unwrap();
        assert_eq!(sys.ground().names(&l), vec!["(0,1)", "(0,2)"]);
        assert!(levels_partition(&sys, &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn signature_blocks_meet_segments_once() {
        let sys = small();
        let p = level_signature_partition(&sys);
        let f = segment_family(&sys, false, DEFAULT_SEGMENT_BUDGET).unwrap();
        for m in f.members() {
            assert!(p.blocks().iter().all(|b| m.intersection(b).len() <= 1));
        }
    }

    #[test]
    fn search_examples() {
        let sys = small();
        let whole = Partition::whole(sys.ground());
        let longest = sys.trees().iter().flat_map(|t| t.nodes().map(|v| t.level(v).unwrap())).max().unwrap() as usize + 1;
        let w = partition_search(&sys, &whole, None, longest, DEFAULT_SEGMENT_BUDGET).unwrap().unwrap();
        assert_eq!(w.segment.len(), longest);
        assert!(w.verify(&sys, &whole, None, longest));
        assert_eq!(partition_search(&sys, &whole, None, longest + 1, DEFAULT_SEGMENT_BUDGET).unwrap(), None);

        let points = Partition::singletons(sys.ground());
        let with = partition_search(&sys, &whole, Some(&points), longest, DEFAULT_SEGMENT_BUDGET).unwrap();
        assert_eq!(with, Some(w));
    }
}
