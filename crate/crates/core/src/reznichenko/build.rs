use std::collections::{BTreeMap, HashSet};

use super::{Lcg, ReznParams, ReznSystem, SatisfiedRequest, StageRecord, ENUMERATION_LIMIT};
use crate::error::Result;

type Node = (u32, u32);

/// A request: `(tree slot, max node)` pairs with distinct, increasing slots.
type Request = Vec<(usize, Node)>;

/// One tree during construction, keyed by node coordinates.
#[derive(Clone, Default)]
struct Growing {
    parent: BTreeMap<Node, Option<Node>>,
    order: Vec<Node>,
}

impl Growing {
    fn add(&mut self, v: Node, parent: Option<Node>) {
        self.parent.insert(v, parent);
        self.order.push(v);
    }

    fn initial_segment(&self, v: Node) -> Vec<Node> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(Some(p)) = self.parent.get(&cur) {
            out.push(*p);
            cur = *p;
        }
        out
    }
}

/// Runs the successor-stage construction for `xi = 1..stages-1`.
pub fn build(params: &ReznParams) -> Result<ReznSystem> {
    params.validate()?;
    let n = params.n_trees as usize;
    let mut trees: Vec<Growing> = vec![Growing::default(); n];
    for (i, t) in trees.iter_mut().enumerate() {
        t.add((0, i as u32 + 1), None);
    }
    let mut rng = Lcg::new(params.rng_seed);
    let mut log = Vec::new();

    for xi in 1..params.stages {
        let segments: Vec<Vec<Vec<Node>>> = trees
            .iter()
            .map(|t| t.order.iter().map(|&v| t.initial_segment(v)).collect())
            .collect();
        let product = trees
            .iter()
            .map(|t| t.order.len() as u64 + 1)
            .try_fold(1u64, |acc, k| acc.checked_mul(k).filter(|&p| p <= ENUMERATION_LIMIT));
        let pool = params.label_pool as usize;
        let min = params.min_request_size as usize;

        let (mut chosen, exhaustive, total, considered) = if product.is_some() {
            let mut all = Vec::new();
            enumerate(&trees, &segments, min, 0, &mut Vec::new(), &mut HashSet::new(), &mut all);
            let total = all.len() as u64;
            if all.len() > pool {
                // Partial Fisher-Yates.
                for i in 0..pool {
                    let j = i + rng.below((all.len() - i) as u64) as usize;
                    all.swap(i, j);
                }
                all.truncate(pool);
            }
            (all, true, Some(total), total)
        } else {
            let (found, attempts) = sample(&trees, &segments, min, pool, &mut rng);
            (found, false, None, attempts)
        };
        chosen.sort_by_key(|r| (r.len(), r.iter().map(|(s, _)| *s).collect::<Vec<_>>(), r.iter().map(|(_, m)| *m).collect::<Vec<_>>()));

        let mut satisfied = Vec::new();
        for (t, req) in chosen.iter().enumerate() {
            let node = (xi, t as u32);
            for &(slot, max) in req {
                trees[slot].add(node, Some(max));
            }
            satisfied.push((t as u32, req.clone()));
        }
        let pool_exhausted = total.map_or(satisfied.len() == pool, |t| t > pool as u64);
        log.push((xi, exhaustive, total, considered, satisfied, pool_exhausted));
    }

    let parent_maps = trees.into_iter().map(|t| t.parent).collect();
    let mut sys = ReznSystem::from_parts(params.clone(), parent_maps, Vec::new())?;
    let atom = |sys: &ReznSystem, v: Node| sys.atom(v.0, v.1).expect("built nodes lie in the grid");
    sys.stage_log = log
        .into_iter()
        .map(|(stage, exhaustive, total_requests, considered, sat, pool_exhausted)| StageRecord {
            stage,
            exhaustive,
            total_requests,
            considered,
            satisfied: sat
                .into_iter()
                .map(|(label, req)| SatisfiedRequest {
                    label,
                    segments: req.into_iter().map(|(s, m)| (s as u32 + 1, atom(&sys, m))).collect(),
                })
                .collect(),
            pool_exhausted,
        })
        .collect();
    Ok(sys)
}

fn enumerate(
    trees: &[Growing],
    segments: &[Vec<Vec<Node>>],
    min: usize,
    slot: usize,
    cur: &mut Request,
    used: &mut HashSet<Node>,
    out: &mut Vec<Request>,
) {
    if slot == trees.len() {
        if cur.len() >= min {
            out.push(cur.clone());
        }
        return;
    }
    if cur.len() + (trees.len() - slot) < min {
        return;
    }
    enumerate(trees, segments, min, slot + 1, cur, used, out);
    for (k, seg) in segments[slot].iter().enumerate() {
        if seg.iter().any(|v| used.contains(v)) {
            continue;
        }
        used.extend(seg.iter().copied());
        cur.push((slot, trees[slot].order[k]));
        enumerate(trees, segments, min, slot + 1, cur, used, out);
        cur.pop();
        for v in seg {
            used.remove(v);
        }
    }
}

/// Rejection sampling of up to `pool` distinct requests; returns them with the attempt count.
fn sample(trees: &[Growing], segments: &[Vec<Vec<Node>>], min: usize, pool: usize, rng: &mut Lcg) -> (Vec<Request>, u64) {
    let mut seen: HashSet<Request> = HashSet::new();
    let mut found = Vec::new();
    let cap = pool as u64 * 1000;
    let mut attempts = 0;
    while found.len() < pool && attempts < cap {
        attempts += 1;
        let slots: Vec<usize> = (0..trees.len()).filter(|_| rng.below(2) == 1).collect();
        if slots.len() < min {
            continue;
        }
        let mut used = HashSet::new();
        let mut req = Vec::with_capacity(slots.len());
        let mut ok = true;
        for s in slots {
            let k = rng.below(trees[s].order.len() as u64) as usize;
            if segments[s][k].iter().any(|v| !used.insert(*v)) {
                ok = false;
                break;
            }
            req.push((s, trees[s].order[k]));
        }
        if ok && seen.insert(req.clone()) {
            found.push(req);
        }
    }
    (found, attempts)
}
