use std::collections::{BTreeMap, HashSet};

use serde_json::{json, Value};

use super::{Lcg, ReznSystem};

const MAX_REPORTED: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub checked: u64,
    /// The first few violations, described.
    pub failures: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            passed: true,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(describe());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReznReport {
    pub checks: Vec<CheckOutcome>,
}

impl ReznReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "checked": c.checked, "failures": c.failures}))
            .collect();
        json!({ "passed": self.passed(), "checks": checks })
    }
}

/// Checks the construction invariants. Structural properties are scanned in full; request
/// satisfaction and pairwise initial-segment intersections are additionally sampled `sample`
/// times with a generator seeded by `seed`.
pub fn verify_system(sys: &ReznSystem, sample: u64, seed: u64) -> ReznReport {
    let g = sys.ground();
    let name = |a: u32| g.atom(a).to_string();
    let params = sys.params();

    let mut roots = CheckOutcome::new("roots");
    for t in sys.trees() {
        let found: Vec<u32> = t.nodes().filter(|&v| t.parent(v).is_none()).collect();
        let expected = sys.atom(0, t.index());
        roots.record(found.len() == 1 && Some(found[0]) == expected, || {
            format!("tree {} has roots {:?}", t.index(), found.iter().map(|&v| name(v)).collect::<Vec<_>>())
        });
    }

    // Which trees each labelled node was promised to, and under which parent.
    let mut promised: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for rec in sys.stage_log() {
        for req in &rec.satisfied {
            if let Some(node) = sys.atom(rec.stage, req.label) {
                promised.entry(node).or_default().extend(req.segments.iter().copied());
            }
        }
    }

    let mut logged = CheckOutcome::new("stage-log");
    let mut successor = CheckOutcome::new("successor-order");
    let mut predecessor = CheckOutcome::new("unique-predecessor");
    for t in sys.trees() {
        for v in t.nodes() {
            let (xi, label) = sys.coords(v);
            logged.record(xi < params.stages && label < params.label_pool, || format!("`{}` outside the grid", name(v)));
            if xi == 0 {
                predecessor.record(t.parent(v).is_none(), || format!("stage-0 node `{}` has a parent in tree {}", name(v), t.index()));
                continue;
            }
            let listed = promised
                .get(&v)
                .is_some_and(|segs| segs.iter().any(|&(n, _)| n == t.index()));
            logged.record(listed, || format!("`{}` in tree {} has no stage-log request", name(v), t.index()));
            match t.parent(v) {
                None => predecessor.record(false, || format!("`{}` has no predecessor in tree {}", name(v), t.index())),
                Some(p) => {
                    predecessor.record(t.contains(p), || format!("predecessor of `{}` is outside tree {}", name(v), t.index()));
                    successor.record(sys.coords(p).0 < xi, || {
                        format!("`{}` sits under `{}` in tree {}", name(v), name(p), t.index())
                    });
                }
            }
        }
    }

    let mut rng = Lcg::new(seed);
    let requests: Vec<(u32, &super::SatisfiedRequest)> = sys
        .stage_log()
        .iter()
        .flat_map(|r| r.satisfied.iter().map(move |s| (r.stage, s)))
        .collect();
    let mut extends = CheckOutcome::new("requests-extended");
    let picks: Vec<usize> = if (requests.len() as u64) <= sample {
        (0..requests.len()).collect()
    } else {
        (0..sample).map(|_| rng.below(requests.len() as u64) as usize).collect()
    };
    for i in picks {
        let (stage, req) = requests[i];
        let node = sys.atom(stage, req.label);
        let mut used = HashSet::new();
        let mut ok = node.is_some();
        for &(n, max) in &req.segments {
            let Ok(t) = sys.tree(n) else {
                ok = false;
                break;
            };
            ok &= node.is_some_and(|x| t.parent(x) == Some(max));
            ok &= t.ancestors(max).into_iter().all(|a| used.insert(a));
        }
        extends.record(ok, || format!("request labelled ({stage},{}) is not extended by its node", req.label));
    }

    // Two initial segments share two nodes exactly when two shared nodes are comparable in both trees.
    let mut disjoint_full = CheckOutcome::new("near-disjointness");
    let trees = sys.trees();
    for (i, a) in trees.iter().enumerate() {
        for b in &trees[i + 1..] {
            for y in a.nodes().filter(|&y| b.contains(y)) {
                for x in a.ancestors(y).into_iter().skip(1).filter(|&x| b.contains(x)) {
                    disjoint_full.record(!b.comparable(x, y), || {
                        format!(
                            "`{}` and `{}` are comparable in trees {} and {}",
                            name(x),
                            name(y),
                            a.index(),
                            b.index()
                        )
                    });
                }
                disjoint_full.checked += 1;
            }
        }
    }

    let mut disjoint_sampled = CheckOutcome::new("near-disjointness-sampled");
    if trees.len() >= 2 {
        for _ in 0..sample {
            let n = rng.below(trees.len() as u64) as usize;
            let m = (n + 1 + rng.below(trees.len() as u64 - 1) as usize) % trees.len();
            let nodes_n: Vec<u32> = trees[n].nodes().collect();
            let nodes_m: Vec<u32> = trees[m].nodes().collect();
            let v = nodes_n[rng.below(nodes_n.len() as u64) as usize];
            let w = nodes_m[rng.below(nodes_m.len() as u64) as usize];
            let shared = trees[n].initial_segment(v).intersection(&trees[m].initial_segment(w)).len();
            disjoint_sampled.record(shared <= 1, || {
                format!(
                    "initial segments to `{}` (tree {}) and `{}` (tree {}) share {shared} nodes",
                    name(v),
                    n + 1,
                    name(w),
                    m + 1
                )
            });
        }
    }

    ReznReport {
        checks: vec![
            roots,
            logged,
            successor,
            predecessor,
            extends,
            disjoint_full,
            disjoint_sampled,
        ],
    }
}

impl super::ReznTree {
    pub fn comparable(&self, a: u32, b: u32) -> bool {
        self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reznichenko::{build, ReznParams};

    #[test]
    fn fresh_systems_pass() {
        for (n, s, pool) in [(2, 1, 3), (3, 4, 8), (4, 6, 12)] {
            let sys = build(&ReznParams {
                n_trees: n,
                stages: s,
                label_pool: pool,
                rng_seed: 3,
                min_request_size: 2,
            })
            .unwrap();
            let r = verify_system(&sys, 1000, 1);
            assert!(r.passed(), "{:?}", r);
        }
    }

    #[test]
    fn reparenting_is_caught() {
        let mut sys = build(&ReznParams {
            n_trees: 3,
            stages: 4,
            label_pool: 8,
            rng_seed: 5,
            min_request_size: 2,
        })
        .unwrap();
        // Move a stage-2 node of tree 1 directly under the root.
        let t = sys.tree(1).unwrap();
        let node = t
            .nodes()
            .find(|&v| sys.coords(v).0 == 2 && t.parent(v) != sys.atom(0, 1))
            .expect("tree 1 has a stage-2 node below stage 1");
        sys.reparent(1, node, sys.atom(0, 1)).unwrap();
        let r = verify_system(&sys, 1000, 1);
        assert!(!r.passed());
        assert!(!r.check("requests-extended").unwrap().passed);
    }
}
