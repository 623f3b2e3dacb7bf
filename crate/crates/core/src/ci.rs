//! Decision procedures for the countably-intersected axioms on finite families, and the
//! constructive disjointification of a finite list of members.
//!
//! At finite scale:
//! - (a) reduces to singleton containment (every finite family is pointwise closed);
//! - (b) is an exact-cover search for `s \ t` among the members inside it;
//! - (c) is checked for tuples of length `1..=sample_bound`; the finiteness clause is vacuous, so
//!   the check demands a member inside every nonempty remainder and reports the residual size,
//!   optionally bounded;
//! - (d) always holds; the largest trace set is reported instead.

use std::collections::{HashMap, HashSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::family::{trace_set, AtomSet, SetFamily};

pub const DEFAULT_EXACT_COVER_LIMIT: usize = 24;
pub const DEFAULT_SAMPLE_BOUND: usize = 3;
pub const DEFAULT_PAIR_BUDGET: u64 = 10_000_000;

/// Pairwise disjoint members whose union is the target set of the producing operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub parts: Vec<AtomSet>,
}

impl Decomposition {
    pub fn union(&self) -> AtomSet {
        self.parts.iter().fold(AtomSet::empty(), |acc, p| acc.union(p))
    }

    pub fn is_pairwise_disjoint(&self) -> bool {
        self.parts
            .iter()
            .enumerate()
            .all(|(i, p)| self.parts[i + 1..].iter().all(|q| p.is_disjoint(q)))
    }
}

/// Writes `s \ t` as a disjoint union of members, if possible. `None` means no decomposition
/// exists (the search is exhaustive).
pub fn check_condition_b(family: &SetFamily, s: &AtomSet, t: &AtomSet) -> Result<Option<Decomposition>> {
    check_condition_b_with(family, s, t, DEFAULT_EXACT_COVER_LIMIT)
}

pub fn check_condition_b_with(
    family: &SetFamily,
    s: &AtomSet,
    t: &AtomSet,
    limit: usize,
) -> Result<Option<Decomposition>> {
    family.require_member(s)?;
    family.require_member(t)?;
    exact_cover(family, &s.difference(t), limit)
}

/// Exact cover of `target` by members of `family` lying inside it.
///
/// Depth-first: the smallest uncovered atom is covered by candidate members tried in order of
/// decreasing size, then canonical order; the first cover found is returned.
pub fn exact_cover(family: &SetFamily, target: &AtomSet, limit: usize) -> Result<Option<Decomposition>> {
    if target.is_empty() {
        return Ok(Some(Decomposition { parts: Vec::new() }));
    }
    let limit = limit.min(64);
    if target.len() > limit {
        return Err(Error::resource("exact-cover atoms", target.len() as u64, limit as u64));
    }
    let pos: HashMap<u32, usize> = target.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut candidates: Vec<(u64, usize)> = family
        .members_within(target)
        .into_iter()
        .map(|m| {
            let mask = family.member(m).iter().fold(0u64, |acc, a| acc | 1 << pos[&a]);
            (mask, m)
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.0.count_ones()
            .cmp(&a.0.count_ones())
            .then(family.member(a.1).cmp(family.member(b.1)))
    });
    let full = if target.len() == 64 { u64::MAX } else { (1u64 << target.len()) - 1 };
    let mut chosen = Vec::new();
    let mut dead = HashSet::new();
    if cover_dfs(&candidates, full, &mut chosen, &mut dead) {
        let parts = chosen.iter().map(|&m| family.member(m).clone()).collect();
        Ok(Some(Decomposition { parts }))
    } else {
        Ok(None)
    }
}

fn cover_dfs(cands: &[(u64, usize)], uncovered: u64, chosen: &mut Vec<usize>, dead: &mut HashSet<u64>) -> bool {
    if uncovered == 0 {
        return true;
    }
    if dead.contains(&uncovered) {
        return false;
    }
    let low = uncovered & uncovered.wrapping_neg();
    for &(mask, m) in cands {
        if mask & low != 0 && mask & !uncovered == 0 {
            chosen.push(m);
            if cover_dfs(cands, uncovered & !mask, chosen, dead) {
                return true;
            }
            chosen.pop();
        }
    }
    dead.insert(uncovered);
    false
}

/// The envelope map `t -> s_t` of condition (c).
#[derive(Clone, Debug, Default)]
pub enum Envelope {
    #[default]
    Identity,
    Explicit(HashMap<AtomSet, AtomSet>),
}

impl Envelope {
    fn of(&self, family: &SetFamily, t: &AtomSet) -> Result<AtomSet> {
        match self {
            Envelope::Identity => Ok(t.clone()),
            Envelope::Explicit(map) => {
                let s = map
                    .get(t)
                    .ok_or_else(|| Error::InvalidEnvelope(family.names(t), Vec::new()))?;
                family.require_member(s)?;
                if !t.is_subset(s) {
                    return Err(Error::InvalidEnvelope(family.names(t), family.names(s)));
                }
                Ok(s.clone())
            }
        }
    }

    /// Resolves the envelope of every member, validating containment.
    pub fn resolve(&self, family: &SetFamily) -> Result<Vec<AtomSet>> {
        family.members().iter().map(|t| self.of(family, t)).collect()
    }
}

/// A failing instance of condition (c).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CWitness {
    pub s: AtomSet,
    pub tuple: Vec<AtomSet>,
    /// `s` minus the union of the envelopes of the tuple.
    pub remainder: AtomSet,
    /// The largest member inside the remainder, if any.
    pub chosen: Option<AtomSet>,
    pub residual: AtomSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionC {
    pub passed: bool,
    pub witness: Option<CWitness>,
    pub max_residual: usize,
    pub remainders_checked: usize,
    pub sample_bound: usize,
    pub residual_bound: Option<usize>,
}

/// Condition (c) for all tuples of length `1..=sample_bound`.
///
/// Only `s ∩ s_t` matters for a tuple element, so the check enumerates unions of at most
/// `sample_bound` distinct traces `s ∩ s_t` rather than raw tuples; each union keeps the first
/// tuple that produced it as its witness.
pub fn check_condition_c(
    family: &SetFamily,
    envelope: &Envelope,
    sample_bound: usize,
    residual_bound: Option<usize>,
) -> Result<ConditionC> {
    let envelopes = envelope.resolve(family)?;
    let mut by_size: Vec<usize> = (0..family.len()).collect();
    by_size.sort_by(|&a, &b| {
        family.member(b).len().cmp(&family.member(a).len()).then(family.member(a).cmp(family.member(b)))
    });

    let mut out = ConditionC {
        passed: true,
        witness: None,
        max_residual: 0,
        remainders_checked: 0,
        sample_bound,
        residual_bound,
    };
    for s in family.members() {
        let mut traces: Vec<(AtomSet, usize)> = Vec::new();
        let mut seen_trace = HashSet::new();
        for (ti, env) in envelopes.iter().enumerate() {
            let x = s.intersection(env);
            if seen_trace.insert(x.clone()) {
                traces.push((x, ti));
            }
        }
        let mut unions: Vec<(AtomSet, Vec<usize>)> = Vec::new();
        let mut seen = HashSet::new();
        let mut frontier: Vec<(AtomSet, Vec<usize>)> = Vec::new();
        if sample_bound >= 1 {
            for (x, ti) in &traces {
                if seen.insert(x.clone()) {
                    frontier.push((x.clone(), vec![*ti]));
                }
            }
        }
        for _ in 1..sample_bound {
            let mut next = Vec::new();
            for (u, tuple) in &frontier {
                for (x, ti) in &traces {
                    let v = u.union(x);
                    if seen.insert(v.clone()) {
                        let mut t2 = tuple.clone();
                        t2.push(*ti);
                        next.push((v, t2));
                    }
                }
            }
            unions.append(&mut frontier);
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        unions.append(&mut frontier);

        for (u, tuple) in unions {
            out.remainders_checked += 1;
            let remainder = s.difference(&u);
            let (chosen, residual) = best_inner_member(family, &by_size, &remainder);
            out.max_residual = out.max_residual.max(residual.len());
            let fails = (!remainder.is_empty() && chosen.is_none())
                || residual_bound.is_some_and(|b| residual.len() > b);
            if fails {
                out.passed = false;
                out.witness = Some(CWitness {
                    s: s.clone(),
                    tuple: tuple.iter().map(|&i| family.member(i).clone()).collect(),
                    remainder,
                    chosen,
                    residual,
                });
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn best_inner_member(family: &SetFamily, by_size: &[usize], remainder: &AtomSet) -> (Option<AtomSet>, AtomSet) {
    if remainder.is_empty() {
        return (None, AtomSet::empty());
    }
    match by_size.iter().find(|&&m| family.member(m).is_subset(remainder)) {
        Some(&m) => {
            let t = family.member(m).clone();
            let residual = remainder.difference(&t);
            (Some(t), residual)
        }
        None => (None, remainder.clone()),
    }
}

/// Re-runs a condition (c) witness from scratch; true when it still fails.
pub fn replay_condition_c(
    family: &SetFamily,
    envelope: &Envelope,
    witness: &CWitness,
    residual_bound: Option<usize>,
) -> Result<bool> {
    family.require_member(&witness.s)?;
    let mut covered = AtomSet::empty();
    for t in &witness.tuple {
        family.require_member(t)?;
        covered = covered.union(&envelope.of(family, t)?);
    }
    let remainder = witness.s.difference(&covered);
    if remainder.is_empty() {
        return Ok(false);
    }
    let mut best: Option<&AtomSet> = None;
    for m in family.members() {
        if m.is_subset(&remainder) && best.is_none_or(|b| m.len() > b.len()) {
            best = Some(m);
        }
    }
    Ok(match best {
        None => true,
        Some(t) => residual_bound.is_some_and(|b| remainder.len() - t.len() > b),
    })
}

/// Rewrites the union of `inputs` as a union of pairwise disjoint members, each contained in some
/// input, by folding inputs one at a time into a running disjoint list and splitting each new
/// input against the list with condition (b) decompositions.
pub fn disjointify(family: &SetFamily, inputs: &[AtomSet]) -> Result<Decomposition> {
    disjointify_with(family, inputs, DEFAULT_EXACT_COVER_LIMIT)
}

pub fn disjointify_with(family: &SetFamily, inputs: &[AtomSet], limit: usize) -> Result<Decomposition> {
    let mut done: Vec<AtomSet> = Vec::new();
    for s in inputs {
        family.require_member(s)?;
        let mut pieces = vec![s.clone()];
        for t in &done {
            let mut next = Vec::with_capacity(pieces.len());
            for p in pieces {
                if p.is_disjoint(t) {
                    next.push(p);
                } else if p.is_subset(t) {
                    continue;
                } else {
                    match exact_cover(family, &p.difference(t), limit)? {
                        Some(d) => next.extend(d.parts),
                        None => {
                            return Err(Error::ConditionBFailed {
                                s: family.names(&p),
                                t: family.names(t),
                            })
                        }
                    }
                }
            }
            pieces = next;
        }
        done.extend(pieces);
    }
    Ok(Decomposition { parts: done })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionA {
    pub passed: bool,
    pub missing: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionB {
    pub passed: bool,
    pub failing_pair: Option<(AtomSet, AtomSet)>,
    pub pairs_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionD {
    pub max_trace_size: usize,
    pub argmax: Option<AtomSet>,
}

/// Per-condition verdicts with replayable witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiReport {
    pub condition_a: ConditionA,
    pub condition_b: ConditionB,
    pub condition_c: ConditionC,
    pub condition_d: ConditionD,
    /// `(pairs needed, pair budget)` when condition (b) was cut short.
    pub truncated: Option<(u64, u64)>,
}

#[derive(Clone, Debug)]
pub struct CiConfig {
    pub sample_bound: usize,
    pub residual_bound: Option<usize>,
    pub exact_cover_limit: usize,
    pub pair_budget: u64,
}

impl Default for CiConfig {
    fn default() -> Self {
        CiConfig {
            sample_bound: DEFAULT_SAMPLE_BOUND,
            residual_bound: None,
            exact_cover_limit: DEFAULT_EXACT_COVER_LIMIT,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl CiReport {
    pub fn passed(&self) -> bool {
        self.truncated.is_none() && self.condition_a.passed && self.condition_b.passed && self.condition_c.passed
    }

    pub fn resource_error(&self) -> Option<Error> {
        self.truncated
            .map(|(needed, limit)| Error::resource("condition (b) pairs", needed, limit))
    }

    /// True when every failing condition's witness still fails on replay.
    pub fn witnesses_replay(&self, family: &SetFamily, envelope: &Envelope, cfg: &CiConfig) -> Result<bool> {
        if !self.condition_a.passed {
            let Some(a) = self.condition_a.missing else { return Ok(false) };
            if family.contains(&AtomSet::singleton(a)) {
                return Ok(false);
            }
        }
        if !self.condition_b.passed {
            let Some((s, t)) = &self.condition_b.failing_pair else { return Ok(false) };
            if check_condition_b_with(family, s, t, cfg.exact_cover_limit)?.is_some() {
                return Ok(false);
            }
        }
        if !self.condition_c.passed {
            let Some(w) = &self.condition_c.witness else { return Ok(false) };
            if !replay_condition_c(family, envelope, w, cfg.residual_bound)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self, family: &SetFamily) -> Value {
        let names = |s: &AtomSet| family.names(s);
        let c = &self.condition_c;
        json!({
            "passed": self.passed(),
            "condition_a": {
                "passed": self.condition_a.passed,
                "missing_singleton": self.condition_a.missing.map(|a| family.ground().atom(a).to_string()),
            },
            "condition_b": {
                "passed": self.condition_b.passed,
                "pairs_checked": self.condition_b.pairs_checked,
                "failing_pair": self.condition_b.failing_pair.as_ref().map(|(s, t)| json!({"s": names(s), "t": names(t)})),
            },
            "condition_c": {
                "passed": c.passed,
                "sample_bound": c.sample_bound,
                "residual_bound": c.residual_bound,
                "max_residual": c.max_residual,
                "remainders_checked": c.remainders_checked,
                "witness": c.witness.as_ref().map(|w| json!({
                    "s": names(&w.s),
                    "tuple": w.tuple.iter().map(names).collect::<Vec<_>>(),
                    "remainder": names(&w.remainder),
                    "chosen": w.chosen.as_ref().map(names),
                    "residual": names(&w.residual),
                })),
            },
            "condition_d": {
                "passed": true,
                "max_trace_size": self.condition_d.max_trace_size,
                "argmax": self.condition_d.argmax.as_ref().map(names),
            },
            "truncated": self.truncated.map(|(needed, limit)| json!({"pairs_needed": needed, "pair_budget": limit})),
        })
    }
}

/// Runs (a), (b) over all ordered pairs in canonical order, (c) and (d).
pub fn check_ci(family: &SetFamily, envelope: &Envelope, cfg: &CiConfig) -> Result<CiReport> {
    let missing = family.missing_singleton();
    let condition_a = ConditionA {
        passed: missing.is_none(),
        missing,
    };

    let n = family.len() as u64;
    let needed = n * n;
    let truncated = (needed > cfg.pair_budget).then_some((needed, cfg.pair_budget));
    let mut memo: HashMap<AtomSet, bool> = HashMap::new();
    let mut condition_b = ConditionB {
        passed: true,
        failing_pair: None,
        pairs_checked: 0,
    };
    'pairs: for s in family.members() {
        for t in family.members() {
            if condition_b.pairs_checked >= cfg.pair_budget {
                break 'pairs;
            }
            condition_b.pairs_checked += 1;
            let diff = s.difference(t);
            let ok = match memo.get(&diff) {
                Some(ok) => *ok,
                None => {
                    let ok = exact_cover(family, &diff, cfg.exact_cover_limit)?.is_some();
                    memo.insert(diff, ok);
                    ok
                }
            };
            if !ok {
                condition_b.passed = false;
                condition_b.failing_pair = Some((s.clone(), t.clone()));
                break 'pairs;
            }
        }
    }

    let condition_c = check_condition_c(family, envelope, cfg.sample_bound, cfg.residual_bound)?;

    let mut condition_d = ConditionD {
        max_trace_size: 0,
        argmax: None,
    };
    for s in family.members() {
        let size = trace_set(family, s)?.len();
        if size > condition_d.max_trace_size {
            condition_d.max_trace_size = size;
            condition_d.argmax = Some(s.clone());
        }
    }

    Ok(CiReport {
        condition_a,
        condition_b,
        condition_c,
        condition_d,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{dyadic_tree, tree_segments, FiniteTree, GroundSet, Provenance, DEFAULT_NODE_LIMIT};

    fn path_segments() -> SetFamily {
        tree_segments(&FiniteTree::path(&["a", "b", "c"]).unwrap())
    }

    fn explicit(atoms: &[&str], members: &[&[&str]]) -> SetFamily {
        let g = GroundSet::new(atoms.iter().copied()).unwrap();
        let m: Vec<Vec<&str>> = members.iter().map(|m| m.to_vec()).collect();
        SetFamily::from_names(&g, &m, Provenance::Explicit).unwrap()
    }

    #[test]
    fn condition_b_on_path() {
        let f = path_segments();
        let s = f.member_of(&["a", "b", "c"]).unwrap();
        let t = f.member_of(&["b"]).unwrap();
        let d = check_condition_b(&f, &s, &t).unwrap().unwrap();
        let named: Vec<Vec<String>> = d.parts.iter().map(|p| f.names(p)).collect();
        assert_eq!(named, vec![vec!["a"], vec!["c"]]);
    }

    #[test]
    fn condition_b_subset_is_empty_decomposition() {
        let f = path_segments();
        let s = f.member_of(&["b"]).unwrap();
        let t = f.member_of(&["a", "b"]).unwrap();
        assert_eq!(check_condition_b(&f, &s, &t).unwrap().unwrap().parts, vec![]);
    }

    #[test]
    fn condition_b_failure() {
        let f = explicit(&["a", "b", "c"], &[&["a", "b"], &["a"], &["c"]]);
        let s = f.member_of(&["a", "b"]).unwrap();
        let t = f.member_of(&["a"]).unwrap();
        assert_eq!(check_condition_b(&f, &s, &t).unwrap(), None);
    }

    #[test]
    fn condition_b_prefers_larger_members() {
        let f = path_segments();
        let s = f.member_of(&["a", "b", "c"]).unwrap();
        let t = f.member_of(&["a"]).unwrap();
        let d = check_condition_b(&f, &s, &t).unwrap().unwrap();
        assert_eq!(d.parts, vec![f.member_of(&["b", "c"]).unwrap()]);
    }

    #[test]
    fn condition_b_resource_limit() {
        let t = dyadic_tree(5, DEFAULT_NODE_LIMIT).unwrap();
        let f = tree_segments(&t);
        let g = f.ground();
        let s = f.member_of(&["0:0", "1:0", "2:0", "3:0", "4:0", "5:0"]).unwrap();
        let small = f.member_of(&["5:0"]).unwrap();
        assert!(matches!(
            check_condition_b_with(&f, &s, &small, 3),
            Err(Error::Resource { .. })
        ));
        assert!(g.len() > 3);
    }

    #[test]
    fn condition_b_unknown_member() {
        let f = path_segments();
        let bogus = f.ground().set_of(&["a", "c"]).unwrap();
        let t = f.member_of(&["b"]).unwrap();
        assert!(matches!(check_condition_b(&f, &bogus, &t), Err(Error::UnknownMember(_))));
    }

    #[test]
    fn condition_c_dyadic_identity_envelope_passes() {
        let f = tree_segments(&dyadic_tree(2, DEFAULT_NODE_LIMIT).unwrap());
        let c = check_condition_c(&f, &Envelope::Identity, 2, None).unwrap();
        assert!(c.passed);
        assert!(c.witness.is_none());
        // s = a 3-chain minus its middle node leaves two isolated atoms.
        assert_eq!(c.max_residual, 1);
    }

    #[test]
    fn condition_c_residual_bound_zero_is_too_strict_for_segments() {
        let f = tree_segments(&FiniteTree::path(&["a", "b", "c"]).unwrap());
        let c = check_condition_c(&f, &Envelope::Identity, 1, Some(0)).unwrap();
        assert!(!c.passed);
        let w = c.witness.unwrap();
        assert_eq!(w.residual.len(), 1);
    }

    #[test]
    fn condition_c_singletons_pass() {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        let f = SetFamily::new(&g, [], Provenance::Explicit, true).unwrap();
        let c = check_condition_c(&f, &Envelope::Identity, 3, Some(0)).unwrap();
        assert!(c.passed);
    }

    #[test]
    fn condition_c_missing_inner_member_fails() {
        let f = explicit(&["a", "b", "c"], &[&["a", "b", "c"], &["a"]]);
        let c = check_condition_c(&f, &Envelope::Identity, 1, None).unwrap();
        assert!(!c.passed);
        let w = c.witness.unwrap();
        assert_eq!(f.names(&w.s), vec!["a", "b", "c"]);
        assert_eq!(w.tuple, vec![f.member_of(&["a"]).unwrap()]);
        assert_eq!(f.names(&w.remainder), vec!["b", "c"]);
        assert!(w.chosen.is_none());
        assert!(replay_condition_c(&f, &Envelope::Identity, &w, None).unwrap());
    }

    #[test]
    fn condition_c_invalid_envelope() {
        let f = path_segments();
        let a = f.member_of(&["a"]).unwrap();
        let b = f.member_of(&["b"]).unwrap();
        let mut map: HashMap<AtomSet, AtomSet> = f.members().iter().map(|m| (m.clone(), m.clone())).collect();
        map.insert(a, b);
        let err = check_condition_c(&f, &Envelope::Explicit(map), 2, None).unwrap_err();
        assert_eq!(err, Error::InvalidEnvelope(vec!["a".into()], vec!["b".into()]));
    }

    #[test]
    fn disjointify_examples() {
        let f = tree_segments(&dyadic_tree(1, DEFAULT_NODE_LIMIT).unwrap());
        let s1 = f.member_of(&["0:0", "1:0"]).unwrap();
        let s2 = f.member_of(&["0:0", "1:1"]).unwrap();
        let d = disjointify(&f, &[s1.clone(), s2]).unwrap();
        assert_eq!(d.parts, vec![s1.clone(), f.member_of(&["1:1"]).unwrap()]);
        assert_eq!(disjointify(&f, std::slice::from_ref(&s1)).unwrap().parts, vec![s1.clone()]);
        let lone = f.member_of(&["1:1"]).unwrap();
        assert_eq!(
            disjointify(&f, &[s1.clone(), lone.clone()]).unwrap().parts,
            vec![s1, lone]
        );
    }

    #[test]
    fn disjointify_reports_offending_pair() {
        let f = explicit(&["a", "b", "c"], &[&["a", "b"], &["a"], &["c"]]);
        let a = f.member_of(&["a"]).unwrap();
        let ab = f.member_of(&["a", "b"]).unwrap();
        assert_eq!(
            disjointify(&f, &[a, ab]).unwrap_err(),
            Error::ConditionBFailed {
                s: vec!["a".into(), "b".into()],
                t: vec!["a".into()]
            }
        );
    }

    #[test]
    fn check_ci_dyadic_depth_two_passes() {
        let f = tree_segments(&dyadic_tree(2, DEFAULT_NODE_LIMIT).unwrap());
        let r = check_ci(&f, &Envelope::Identity, &CiConfig::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.condition_b.pairs_checked, (f.len() * f.len()) as u64);
        // A root-to-leaf chain of 3 nodes has 6 subsegments, plus the empty trace.
        assert_eq!(r.condition_d.max_trace_size, 7);
    }

    #[test]
    fn check_ci_missing_singleton() {
        let f = explicit(&["a", "b"], &[&["a"], &["a", "b"]]);
        let r = check_ci(&f, &Envelope::Identity, &CiConfig::default()).unwrap();
        assert!(!r.condition_a.passed);
        assert_eq!(r.condition_a.missing, Some(1));
        assert!(r.witnesses_replay(&f, &Envelope::Identity, &CiConfig::default()).unwrap());
    }

    #[test]
    fn check_ci_condition_b_metamorphic() {
        let f = explicit(&["a", "b", "c"], &[&["a", "b"], &["b", "c"], &["a"], &["c"], &["b"]]);
        let r = check_ci(&f, &Envelope::Identity, &CiConfig::default()).unwrap();
        assert!(r.condition_b.passed);
        let without_a = f.without_member(f.position(&f.member_of(&["a"]).unwrap()).unwrap());
        let r = check_ci(&without_a, &Envelope::Identity, &CiConfig::default()).unwrap();
        assert!(!r.condition_b.passed);
        let (s, t) = r.condition_b.failing_pair.clone().unwrap();
        assert_eq!(without_a.names(&s), vec!["a", "b"]);
        assert!(without_a.names(&t) == vec!["b"] || without_a.names(&t) == vec!["b", "c"]);
        assert!(r
            .witnesses_replay(&without_a, &Envelope::Identity, &CiConfig::default())
            .unwrap());
    }

    #[test]
    fn check_ci_truncates_on_pair_budget() {
        let f = path_segments();
        let cfg = CiConfig {
            pair_budget: 5,
            ..CiConfig::default()
        };
        let r = check_ci(&f, &Envelope::Identity, &cfg).unwrap();
        assert_eq!(r.truncated, Some((36, 5)));
        assert_eq!(r.condition_b.pairs_checked, 5);
        assert!(!r.passed());
        assert!(r.resource_error().unwrap().is_resource());
    }
}
