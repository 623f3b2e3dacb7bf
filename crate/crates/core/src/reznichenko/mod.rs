//! A finite-stage version of the Reznichenko tree system.
//!
//! The ground set is `{0..stages-1} x {0..label_pool-1}`; tree `n` (1-based) is rooted at `(0, n)`.
//! At each successor stage `xi` the extension requests are families `(A_n)_{n in I}` of pairwise
//! disjoint root-anchored chains, one in each tree of `I`, with `|I| >= min_request_size`. Up to
//! `label_pool` requests are kept, sorted, and the `t`-th one receives the node `(xi, t)`, which
//! becomes a child of `max A_n` in every tree `n` of `I`.
//!
//! When there are more requests than labels a seeded 64-bit linear congruential generator picks
//! the kept ones (multiplier 6364136223846793005, increment 1442695040888963407, high 32 bits
//! used).

mod build;
mod search;
mod verify;

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::family::{AtomSet, Ground, GroundSet};

pub use build::build;
pub use search::{
    level_signature_partition, levels_partition, partition_search, segment_family, ReznWitness, SearchMethod,
    DEFAULT_SEGMENT_BUDGET,
};
pub use verify::{verify_system, CheckOutcome, ReznReport};

/// Full enumeration of requests is used while the product of `(tree size + 1)` stays below this.
pub const ENUMERATION_LIMIT: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReznParams {
    pub n_trees: u32,
    pub stages: u32,
    pub label_pool: u32,
    pub rng_seed: u64,
    pub min_request_size: u32,
}

impl Default for ReznParams {
    fn default() -> Self {
        ReznParams {
            n_trees: 8,
            stages: 32,
            label_pool: 64,
            rng_seed: 0x5EED,
            min_request_size: 2,
        }
    }
}

impl ReznParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n_trees < 2 {
            return bad(format!("n_trees must be at least 2, got {}", self.n_trees));
        }
        if self.stages < 1 {
            return bad("stages must be at least 1".into());
        }
        // Roots use the labels 1..=n_trees.
        if self.label_pool <= self.n_trees {
            return bad(format!(
                "label_pool must exceed n_trees so that the roots (0,1)..(0,{}) are labels, got {}",
                self.n_trees, self.label_pool
            ));
        }
        if self.min_request_size < 1 || self.min_request_size > self.n_trees {
            return bad(format!("min_request_size must lie in 1..={}", self.n_trees));
        }
        Ok(())
    }
}

/// The 64-bit linear congruential generator used for sampling.
#[derive(Clone, Debug)]
pub struct Lcg(u64);

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self.0.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        (self.0 >> 32) as u32
    }

    /// Uniform-ish value in `0..n` (`n > 0`).
    pub fn below(&mut self, n: u64) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        ((((hi << 32) | lo) as u128 * n as u128) >> 64) as u64
    }
}

pub fn node_name(xi: u32, t: u32) -> String {
    format!("({xi},{t})")
}

fn parse_node(name: &str) -> Option<(u32, u32)> {
    let inner = name.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// One tree of the system, on the shared ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReznTree {
    index: u32,
    parent: BTreeMap<u32, Option<u32>>,
    level: BTreeMap<u32, u32>,
    children: BTreeMap<u32, Vec<u32>>,
}

impl ReznTree {
    fn new(index: u32, parent: BTreeMap<u32, Option<u32>>, ground: &Ground) -> Result<Self> {
        let mut children: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        let mut roots = 0;
        for (&v, p) in &parent {
            match p {
                Some(p) if !parent.contains_key(p) => {
                    return Err(Error::InvalidTree(format!(
                        "tree {index}: parent `{}` of `{}` is not in the tree",
                        ground.atom(*p),
                        ground.atom(v)
                    )))
                }
                Some(p) => children.entry(*p).or_default().push(v),
                None => roots += 1,
            }
        }
        if roots != 1 {
            return Err(Error::InvalidTree(format!("tree {index} has {roots} roots")));
        }
        let mut level = BTreeMap::new();
        for &v in parent.keys() {
            let mut depth = 0u32;
            let mut cur = v;
            while let Some(Some(p)) = parent.get(&cur) {
                depth += 1;
                if depth as usize > parent.len() {
                    return Err(Error::InvalidTree(format!("tree {index} has a cycle")));
                }
                cur = *p;
            }
            level.insert(v, depth);
        }
        Ok(ReznTree {
            index,
            parent,
            level,
            children,
        })
    }

    /// 1-based tree index.
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.parent.contains_key(&v)
    }

    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        self.parent.keys().copied()
    }

    pub fn node_set(&self) -> AtomSet {
        self.nodes().collect()
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent.get(&v).copied().flatten()
    }

    pub fn children(&self, v: u32) -> &[u32] {
        self.children.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn level(&self, v: u32) -> Option<u32> {
        self.level.get(&v).copied()
    }

    pub fn level_nodes(&self, k: u32) -> impl Iterator<Item = u32> + '_ {
        self.level.iter().filter(move |(_, &l)| l == k).map(|(&v, _)| v)
    }

    /// `v` and its ancestors, from `v` up to the root.
    pub fn ancestors(&self, v: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut cur = self.contains(v).then_some(v);
        while let Some(c) = cur {
            out.push(c);
            cur = self.parent(c);
        }
        out
    }

    /// The initial segment with maximum `v`.
    pub fn initial_segment(&self, v: u32) -> AtomSet {
        AtomSet::from_indices(self.ancestors(v))
    }

    pub fn is_ancestor(&self, a: u32, b: u32) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.parent(c);
        }
        false
    }
}

/// A request that received a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatisfiedRequest {
    pub label: u32,
    /// `(tree index, max of the initial segment)`, by tree index.
    pub segments: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: u32,
    /// Whether every request was enumerated.
    pub exhaustive: bool,
    /// Number of requests, when enumerated.
    pub total_requests: Option<u64>,
    /// Requests enumerated, or sampling attempts made.
    pub considered: u64,
    pub satisfied: Vec<SatisfiedRequest>,
    pub pool_exhausted: bool,
}

impl StageRecord {
    pub fn unsatisfied(&self) -> Option<u64> {
        self.total_requests.map(|t| t - self.satisfied.len() as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReznSystem {
    params: ReznParams,
    ground: Ground,
    coords: Vec<(u32, u32)>,
    trees: Vec<ReznTree>,
    stage_log: Vec<StageRecord>,
}

/// Parent of each `(xi, t)` node, `None` at the root.
type ParentMap = BTreeMap<(u32, u32), Option<(u32, u32)>>;

impl ReznSystem {
    pub fn params(&self) -> &ReznParams {
        &self.params
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn trees(&self) -> &[ReznTree] {
        &self.trees
    }

    /// Tree by 1-based index.
    pub fn tree(&self, index: u32) -> Result<&ReznTree> {
        index
            .checked_sub(1)
            .and_then(|i| self.trees.get(i as usize))
            .ok_or(Error::IndexOutOfRange {
                index: index as usize,
                max: self.trees.len(),
            })
    }

    pub fn stage_log(&self) -> &[StageRecord] {
        &self.stage_log
    }

    /// `(xi, t)` of an atom.
    pub fn coords(&self, atom: u32) -> (u32, u32) {
        self.coords[atom as usize]
    }

    pub fn atom(&self, xi: u32, t: u32) -> Option<u32> {
        self.ground.index_of(&node_name(xi, t))
    }

    /// Atoms that lie in some tree.
    pub fn used_atoms(&self) -> AtomSet {
        let mut all: Vec<u32> = self.trees.iter().flat_map(ReznTree::nodes).collect();
        all.sort_unstable();
        all.dedup();
        AtomSet::from_indices(all)
    }

    /// Moves `node` under `parent` in one tree. Meant for fault injection.
    pub fn reparent(&mut self, tree: u32, node: u32, parent: Option<u32>) -> Result<()> {
        let t = self.tree(tree)?.clone();
        if !t.contains(node) {
            return Err(Error::InvalidTree(format!("`{}` is not in tree {tree}", self.ground.atom(node))));
        }
        let mut map = t.parent;
        map.insert(node, parent);
        self.trees[tree as usize - 1] = ReznTree::new(tree, map, &self.ground)?;
        Ok(())
    }

    fn from_parts(params: ReznParams, trees: Vec<ParentMap>, stage_log: Vec<StageRecord>) -> Result<Self> {
        let (ground, coords) = grid(&params)?;
        let idx = |c: (u32, u32)| -> Result<u32> {
            ground
                .index_of(&node_name(c.0, c.1))
                .ok_or_else(|| Error::UnknownAtom(node_name(c.0, c.1)))
        };
        let trees = trees
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let parent = t
                    .into_iter()
                    .map(|(v, p)| Ok((idx(v)?, p.map(idx).transpose()?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                ReznTree::new(i as u32 + 1, parent, &ground)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReznSystem {
            params,
            ground,
            coords,
            trees,
            stage_log,
        })
    }

    pub fn to_json(&self) -> Value {
        let name = |a: u32| Value::String(self.ground.atom(a).to_string());
        let trees: Vec<Value> = self
            .trees
            .iter()
            .map(|t| {
                let parent: Map<String, Value> = t
                    .parent
                    .iter()
                    .map(|(&v, p)| (self.ground.atom(v).to_string(), p.map_or(Value::Null, name)))
                    .collect();
                json!({ "index": t.index, "parent": parent })
            })
            .collect();
        let log: Vec<Value> = self
            .stage_log
            .iter()
            .map(|r| {
                let satisfied: Vec<Value> = r
                    .satisfied
                    .iter()
                    .map(|s| {
                        let segs: Vec<Value> = s.segments.iter().map(|&(n, m)| json!([n, name(m)])).collect();
                        json!({ "label": s.label, "segments": segs })
                    })
                    .collect();
                json!({
                    "stage": r.stage,
                    "exhaustive": r.exhaustive,
                    "total_requests": r.total_requests,
                    "considered": r.considered,
                    "pool_exhausted": r.pool_exhausted,
                    "unsatisfied": r.unsatisfied(),
                    "satisfied": satisfied,
                })
            })
            .collect();
        json!({
            "params": {
                "n_trees": self.params.n_trees,
                "stages": self.params.stages,
                "label_pool": self.params.label_pool,
                "rng_seed": self.params.rng_seed,
                "min_request_size": self.params.min_request_size,
            },
            "trees": trees,
            "stage_log": log,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let err = |m: &str| Error::Parse(format!("reznichenko system: {m}"));
        let p = v.get("params").ok_or_else(|| err("missing params"))?;
        let num = |k: &str| -> Result<u64> {
            p.get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| err(&format!("params.{k} must be a nonnegative integer")))
        };
        let small = |k: &str| -> Result<u32> { u32::try_from(num(k)?).map_err(|_| err(&format!("params.{k} too large"))) };
        let params = ReznParams {
            n_trees: small("n_trees")?,
            stages: small("stages")?,
            label_pool: small("label_pool")?,
            rng_seed: num("rng_seed")?,
            min_request_size: small("min_request_size")?,
        };
        params.validate()?;
        let node = |x: &Value| -> Result<(u32, u32)> {
            x.as_str()
                .and_then(parse_node)
                .ok_or_else(|| err(&format!("bad node {x}")))
        };
        let trees = v
            .get("trees")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing trees"))?
            .iter()
            .map(|t| {
                t.get("parent")
                    .and_then(Value::as_object)
                    .ok_or_else(|| err("tree without parent map"))?
                    .iter()
                    .map(|(k, p)| {
                        let key = parse_node(k).ok_or_else(|| err(&format!("bad node {k}")))?;
                        let par = if p.is_null() { None } else { Some(node(p)?) };
                        Ok((key, par))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if trees.len() != params.n_trees as usize {
            return Err(err("tree count differs from params.n_trees"));
        }
        let (ground, _) = grid(&params)?;
        let atom = |x: &Value| -> Result<u32> {
            let (a, b) = node(x)?;
            ground.require(&node_name(a, b))
        };
        let stage_log = v
            .get("stage_log")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing stage_log"))?
            .iter()
            .map(|r| {
                let field = |k: &str| r.get(k).ok_or_else(|| err(&format!("stage record without {k}")));
                let satisfied = field("satisfied")?
                    .as_array()
                    .ok_or_else(|| err("satisfied must be a list"))?
                    .iter()
                    .map(|s| {
                        let label = s.get("label").and_then(Value::as_u64).ok_or_else(|| err("bad label"))? as u32;
                        let segments = s
                            .get("segments")
                            .and_then(Value::as_array)
                            .ok_or_else(|| err("bad segments"))?
                            .iter()
                            .map(|pair| {
                                let n = pair.get(0).and_then(Value::as_u64).ok_or_else(|| err("bad tree index"))?;
                                let m = atom(pair.get(1).ok_or_else(|| err("bad segment max"))?)?;
                                Ok((n as u32, m))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(SatisfiedRequest { label, segments })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(StageRecord {
                    stage: field("stage")?.as_u64().ok_or_else(|| err("bad stage"))? as u32,
                    exhaustive: field("exhaustive")?.as_bool().ok_or_else(|| err("bad exhaustive flag"))?,
                    total_requests: field("total_requests")?.as_u64(),
                    considered: field("considered")?.as_u64().ok_or_else(|| err("bad considered"))?,
                    satisfied,
                    pool_exhausted: field("pool_exhausted")?.as_bool().ok_or_else(|| err("bad pool_exhausted"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(params, trees, stage_log)
    }
}

/// Ground set of all `(xi, t)` and the coordinates of each atom.
fn grid(params: &ReznParams) -> Result<(Ground, Vec<(u32, u32)>)> {
    let names = (0..params.stages).flat_map(|xi| (0..params.label_pool).map(move |t| node_name(xi, t)));
    let ground = GroundSet::new(names)?;
    let coords = ground
        .atoms()
        .iter()
        .map(|a| parse_node(a).expect("grid atoms are node names"))
        .collect();
    Ok((ground, coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ReznParams::default().validate().is_ok());
        let p = |n, s, pool| ReznParams {
            n_trees: n,
            stages: s,
            label_pool: pool,
            ..ReznParams::default()
        };
        assert!(p(1, 4, 8).validate().is_err());
        assert!(p(3, 0, 8).validate().is_err());
        assert!(p(3, 2, 3).validate().is_err());
        assert!(p(3, 2, 4).validate().is_ok());
    }

    #[test]
    fn lcg_is_deterministic() {
        let mut a = Lcg::new(1);
        let mut b = Lcg::new(1);
        let xs: Vec<u64> = (0..10).map(|_| a.below(100)).collect();
        let ys: Vec<u64> = (0..10).map(|_| b.below(100)).collect();
        assert_eq!(xs, ys);
        assert!(xs.iter().all(|&x| x < 100));
    }

    #[test]
    fn node_names_round_trip() {
        assert_eq!(parse_node(&node_name(3, 17)), Some((3, 17)));
        assert_eq!(parse_node("3,17"), None);
    }

    #[test]
    fn json_round_trip() {
        let sys = build(&ReznParams {
            n_trees: 3,
            stages: 4,
            label_pool: 8,
            rng_seed: 9,
            min_request_size: 2,
        })
        .unwrap();
        let back = ReznSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(back, sys);
    }
}
