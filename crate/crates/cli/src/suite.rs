//! The acceptance criteria as seeded, deterministic checks against independent oracles.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io;
use std::path::Path;

use clap::Parser;
use num_traits::{One, Signed, Zero};
use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use jsnorm_core::ci::{check_ci, disjointify, CiConfig, Envelope};
use jsnorm_core::family::{dyadic_tree, tree_segments, AtomSet, Ground, GroundSet, Partition, DEFAULT_NODE_LIMIT};
use jsnorm_core::io as fio;
use jsnorm_core::norm::{
    dual_eval, greedy_extract, k_bound, norm_oracle, norm_tree_dp, DualCombination, GreedyConfig, NormConfig,
};
use jsnorm_core::rational::{ratio, sqrt_lower, sqrt_upper, Rational};
use jsnorm_core::reznichenko::{build, node_name, partition_search, verify_system, ReznParams, ReznSystem};
use jsnorm_core::talagrand::{
    admissible_family, eberleinize, is_admissible, qe_partition_search, saturation_partition, Characteristic, SeqGrid,
};
use jsnorm_core::{Error, FinVector, SetFamily};

use crate::app::{Cli, DEFAULT_SEED};
use crate::commands::{run_with_cap, Budgets};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub budgets: Budgets,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            budgets: Budgets::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub measured: Value,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub criteria: Vec<Criterion>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        let criteria: Vec<Value> = self
            .criteria
            .iter()
            .map(|c| json!({ "id": c.id, "name": c.name, "passed": c.passed, "measured": c.measured }))
            .collect();
        json!({ "passed": self.passed(), "criteria": criteria })
    }
}

type Check = fn(&SuiteConfig, &mut ChaCha8Rng) -> Result<(bool, Value), Error>;

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "oracle/DP equivalence"),
    (2, "norm axioms"),
    (3, "dual bounds"),
    (4, "disjointify"),
    (5, "C.I. suite"),
    (6, "Talagrand admissibility and qe search"),
    (7, "greedy extraction"),
    (8, "Reznichenko system"),
    (9, "saturation"),
    (10, "determinism"),
];

fn check_for(id: u32) -> Check {
    match id {
        1 => oracle_dp_equivalence,
        2 => norm_axioms,
        3 => dual_bounds,
        4 => disjointify_parts,
        5 => ci_suite,
        6 => talagrand,
        7 => greedy,
        8 => reznichenko,
        9 => saturation,
        10 => determinism,
        _ => panic!("no criterion {id}"),
    }
}

/// Runs one criterion; errors count as failures and are reported in `measured`.
pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> Criterion {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .unwrap_or_else(|| panic!("no criterion {id}"));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(31).wrapping_add(id as u64));
    let (passed, measured) = match check_for(id)(cfg, &mut rng) {
        Ok(r) => r,
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    Criterion {
        id,
        name,
        passed,
        measured,
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    SuiteReport {
        criteria: CRITERIA.iter().map(|c| run_criterion(c.0, cfg)).collect(),
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.random_range(-3..=3), rng.random_range(1..=4))
}

/// Entries in `{-3..3}/{1..4}` on every atom.
fn random_vector(rng: &mut ChaCha8Rng, ground: &Ground) -> FinVector {
    let entries: Vec<(u32, Rational)> = (0..ground.len() as u32).map(|a| (a, random_rational(rng))).collect();
    FinVector::from_indexed(ground, entries).expect("indices lie in the ground set")
}

/// Smallest integer `m >= 1` with `m^2 >= x`.
fn ceil_sqrt(x: &Rational) -> Rational {
    let mut m = Rational::one();
    while &(&m * &m) < x {
        m += Rational::one();
    }
    m
}

fn random_partition(rng: &mut ChaCha8Rng, ground: &Ground, cells: usize) -> Partition {
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); cells];
    for a in 0..ground.len() as u32 {
        blocks[rng.random_range(0..cells)].push(a);
    }
    let blocks = blocks.into_iter().filter(|b| !b.is_empty()).map(AtomSet::from_indices).collect();
    Partition::new(ground, blocks).expect("labels partition the ground set")
}

fn segments(depth: u32) -> Result<(jsnorm_core::family::FiniteTree, SetFamily), Error> {
    let tree = dyadic_tree(depth, DEFAULT_NODE_LIMIT)?;
    let family = tree_segments(&tree);
    Ok((tree, family))
}

fn oracle_dp_equivalence(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let ncfg = NormConfig {
        oracle_limit: 64,
        state_budget: cfg.budgets.state_budget,
    };
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for depth in 1..=5 {
        let (tree, family) = segments(depth)?;
        for _ in 0..500 {
            let phi = random_vector(rng, tree.ground());
            let a = norm_oracle(&family, &phi, &ncfg)?;
            let b = norm_tree_dp(&tree, &phi)?;
            cases += 1;
            if a.norm_sq != b.norm_sq && mismatches.len() < 5 {
                mismatches.push(json!({ "depth": depth, "vector": fio::vector_to_json(&phi) }));
            }
        }
    }
    Ok((mismatches.is_empty(), json!({ "cases": cases, "mismatches": mismatches })))
}

fn norm_axioms(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let (_, family) = segments(3)?;
    let g = family.ground().clone();
    let ncfg = NormConfig {
        oracle_limit: cfg.budgets.oracle_limit.max(g.len()),
        state_budget: cfg.budgets.state_budget,
    };
    let norm_sq = |phi: &FinVector| norm_oracle(&family, phi, &ncfg).map(|r| r.norm_sq);
    let tolerance = ratio(1, 1_000_000_000);
    let digits = 50;
    let (mut homogeneity, mut triangle, mut l2) = (0, 0, 0);
    for _ in 0..1000 {
        let phi = random_vector(rng, &g);
        let psi = random_vector(rng, &g);
        let c = loop {
            let c = random_rational(rng);
            if !c.is_zero() {
                break c;
            }
        };
        let n_phi = norm_sq(&phi)?;
        let n_psi = norm_sq(&psi)?;
        if norm_sq(&phi.scale(&c))? != &c * &c * &n_phi {
            homogeneity += 1;
        }
        let n_sum = norm_sq(&phi.add(&psi)?)?;
        if sqrt_lower(&n_sum, digits) > sqrt_upper(&n_phi, digits) + sqrt_upper(&n_psi, digits) + &tolerance {
            triangle += 1;
        }
        if n_phi < phi.l2_sq() {
            l2 += 1;
        }
    }
    let mut units = 0;
    for a in 0..g.len() as u32 {
        if norm_sq(&FinVector::unit(&g, a)?)? != Rational::one() {
            units += 1;
        }
    }
    let passed = homogeneity + triangle + l2 + units == 0;
    Ok((
        passed,
        json!({
            "vectors": 1000,
            "homogeneity_failures": homogeneity,
            "triangle_failures": triangle,
            "l2_bound_failures": l2,
            "unit_vector_failures": units,
            "atoms": g.len(),
        }),
    ))
}

fn dual_bounds(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let (_, family) = segments(3)?;
    let g = family.ground().clone();
    let ncfg = NormConfig {
        oracle_limit: cfg.budgets.oracle_limit.max(g.len()),
        state_budget: cfg.budgets.state_budget,
    };
    let (mut bound_failures, mut witness_failures) = (0, 0);
    for _ in 0..500 {
        let mut order: Vec<usize> = (0..family.len()).collect();
        order.shuffle(rng);
        let want = rng.random_range(1..=4);
        let mut terms: Vec<(Rational, AtomSet)> = Vec::new();
        for i in order {
            let s = family.member(i);
            if terms.len() < want && terms.iter().all(|(_, t)| t.is_disjoint(s)) {
                let lambda = loop {
                    let l = random_rational(rng);
                    if !l.is_zero() {
                        break l;
                    }
                };
                terms.push((lambda, s.clone()));
            }
        }
        let mass: Rational = terms.iter().map(|(l, _)| l * l).sum();
        let m = ceil_sqrt(&mass);
        let terms = terms.into_iter().map(|(l, s)| (l / &m, s)).collect();
        let combo = DualCombination::new(&family, terms)?;
        let phi = random_vector(rng, &g);
        let r = norm_oracle(&family, &phi, &ncfg)?;
        let value = dual_eval(&family, &combo, &phi)?;
        if &value * &value > combo.mass() * &r.norm_sq {
            bound_failures += 1;
        }
        if r.witness_value(&phi) != r.norm_sq {
            witness_failures += 1;
        }
    }
    Ok((
        bound_failures + witness_failures == 0,
        json!({ "combinations": 500, "bound_failures": bound_failures, "witness_failures": witness_failures }),
    ))
}

fn disjointify_parts(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let (_, family) = segments(4)?;
    let mut failures = Vec::new();
    let mut parts_total = 0;
    for _ in 0..1000 {
        let k = rng.random_range(1..=6);
        let inputs: Vec<AtomSet> = (0..k)
            .map(|_| family.member(rng.random_range(0..family.len())).clone())
            .collect();
        let d = disjointify(&family, &inputs)?;
        parts_total += d.parts.len();
        let union = inputs.iter().fold(AtomSet::empty(), |acc, s| acc.union(s));
        let ok = d.is_pairwise_disjoint()
            && d.union() == union
            && d.parts.iter().all(|p| family.contains(p) && inputs.iter().any(|s| p.is_subset(s)));
        if !ok && failures.len() < 5 {
            failures.push(json!(inputs.iter().map(|s| family.names(s)).collect::<Vec<_>>()));
        }
    }
    Ok((failures.is_empty(), json!({ "lists": 1000, "parts": parts_total, "failures": failures })))
}

fn ci_suite(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let ci = CiConfig {
        sample_bound: 3,
        pair_budget: cfg.budgets.pair,
        ..CiConfig::default()
    };
    let mut base = Vec::new();
    let mut families = Vec::new();
    for d in 0..=4 {
        let (_, family) = segments(d)?;
        let report = check_ci(&family, &Envelope::Identity, &ci)?;
        if let Some(e) = report.resource_error() {
            return Err(e);
        }
        base.push(json!({ "depth": d, "members": family.len(), "passed": report.passed() }));
        families.push((report.passed(), family));
    }
    let (mut still_pass, mut replayed, mut witness_free) = (0, 0, 0);
    for _ in 0..20 {
        let d = rng.random_range(1..=4);
        let family = &families[d].1;
        let reduced = family.without_member(rng.random_range(0..family.len()));
        let report = check_ci(&reduced, &Envelope::Identity, &ci)?;
        if report.passed() {
            still_pass += 1;
        } else if report.witnesses_replay(&reduced, &Envelope::Identity, &ci)? {
            replayed += 1;
        } else {
            witness_free += 1;
        }
    }
    let passed = families.iter().all(|f| f.0) && witness_free == 0;
    Ok((
        passed,
        json!({
            "families": base,
            "deletions": { "still_pass": still_pass, "fail_with_replaying_witness": replayed, "witness_free_failures": witness_free },
        }),
    ))
}

fn qe_feasible(family: &SetFamily, gamma_d: &Partition, gamma_n: &Partition, threshold: usize) -> bool {
    family.members().iter().any(|s| {
        let mut blocks = HashSet::new();
        let spread = s.iter().all(|a| blocks.insert(gamma_d.block_of(a)));
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for a in s.iter() {
            *counts.entry(gamma_n.block_of(a)).or_insert(0) += 1;
        }
        spread && counts.values().any(|&c| c >= threshold)
    })
}

/// Positions `n` (1-based) at which the sequences agree before `n` and pairwise differ at `n`.
fn characteristics(grid: &SeqGrid, set: &AtomSet) -> Vec<u32> {
    let seqs: Vec<&[u32]> = set.iter().map(|a| grid.digits(a)).collect();
    (1..=grid.length())
        .filter(|&n| {
            let p = n as usize - 1;
            let agree = seqs.iter().all(|s| s[..p] == seqs[0][..p]);
            let distinct: HashSet<u32> = seqs.iter().map(|s| s[p]).collect();
            agree && distinct.len() == seqs.len()
        })
        .collect()
}

fn talagrand(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let grid = SeqGrid::new(4, 3, cfg.budgets.grid)?;
    let (family, strata) = admissible_family(&grid, 4, cfg.budgets.family)?;

    let mut hereditary = 0;
    for _ in 0..1000 {
        let a = family.member(rng.random_range(0..family.len()));
        let sub: Vec<u32> = a.iter().filter(|_| rng.random_bool(0.5)).collect();
        let sub = if sub.is_empty() { AtomSet::singleton(a.as_slice()[0]) } else { AtomSet::from_indices(sub) };
        if is_admissible(&grid, &sub)?.is_err() {
            hereditary += 1;
        }
    }

    let mut uniqueness = 0;
    let mut checked = 0;
    for s in family.members().iter().filter(|s| s.len() >= 2) {
        checked += 1;
        let ns = characteristics(&grid, s);
        let reported = is_admissible(&grid, s)?.ok().map(|r| r.characteristic);
        if ns.len() != 1 || reported != Some(Characteristic::Exactly(ns[0])) || strata.get(s) != Some(&ns[0]) {
            uniqueness += 1;
        }
    }

    let small = SeqGrid::new(4, 2, cfg.budgets.grid)?;
    let (qe_family, _) = admissible_family(&small, 4, cfg.budgets.family)?;
    let g = qe_family.ground().clone();
    let (mut agree, mut feasible) = (0, 0);
    for _ in 0..200 {
        let k = rng.random_range(1..=8);
        let gamma_d = random_partition(rng, &g, k);
        let k = rng.random_range(1..=4);
        let gamma_n = random_partition(rng, &g, k);
        let threshold = rng.random_range(1..=4);
        let expected = qe_feasible(&qe_family, &gamma_d, &gamma_n, threshold);
        let found = qe_partition_search(&qe_family, &gamma_d, &gamma_n, threshold)?;
        let valid = found
            .as_ref()
            .is_none_or(|w| w.verify(&qe_family, &gamma_d, &gamma_n, threshold));
        feasible += expected as usize;
        if found.is_some() == expected && valid {
            agree += 1;
        }
    }
    let passed = hereditary == 0 && uniqueness == 0 && agree == 200;
    Ok((
        passed,
        json!({
            "hereditary_pairs": 1000,
            "hereditary_failures": hereditary,
            "characteristic_sets": checked,
            "characteristic_failures": uniqueness,
            "qe_instances": 200,
            "qe_feasible": feasible,
            "qe_agreements": agree,
        }),
    ))
}

fn greedy(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let k_half = k_bound(&ratio(1, 2))?;
    let k_one = k_bound(&ratio(1, 1))?;
    let (_, family) = segments(3)?;
    let g = family.ground().clone();
    let gcfg = GreedyConfig {
        norm: NormConfig {
            oracle_limit: cfg.budgets.oracle_limit.max(g.len()),
            state_budget: cfg.budgets.state_budget,
        },
        ..GreedyConfig::default()
    };
    let epsilons = [ratio(1, 4), ratio(1, 3), ratio(1, 2), ratio(2, 3), ratio(1, 1)];
    let (mut over, mut invalid, mut selections) = (0, 0, 0);
    for _ in 0..200 {
        let len = rng.random_range(1..=8);
        let mut phis = Vec::with_capacity(len);
        for _ in 0..len {
            let mut phi = random_vector(rng, &g);
            if rng.random_bool(0.5) {
                let entries: Vec<(u32, Rational)> = phi.entries().map(|(a, q)| (a, q.abs())).collect();
                phi = FinVector::from_indexed(&g, entries)?;
            }
            let n = norm_oracle(&family, &phi, &gcfg.norm)?.norm_sq;
            phis.push(phi.scale(&ceil_sqrt(&n).recip()));
        }
        let eps = &epsilons[rng.random_range(0..epsilons.len())];
        let cert = greedy_extract(&family, &phis, eps, &gcfg)?;
        selections += cert.chosen_sets.len();
        if cert.chosen_sets.len() as u64 > cert.k_bound {
            over += 1;
        }
        if !cert.verify(&phis) {
            invalid += 1;
        }
    }
    let passed = k_half == 5 && k_one == 2 && over == 0 && invalid == 0;
    Ok((
        passed,
        json!({
            "k_bound_half": k_half,
            "k_bound_one": k_one,
            "lists": 200,
            "selections": selections,
            "over_bound": over,
            "invalid_certificates": invalid,
        }),
    ))
}

/// Whether some segment meets a cell in `threshold` nodes while meeting each `gamma_d` block once.
fn segment_feasible(sys: &ReznSystem, cells: &Partition, gamma_d: Option<&Partition>, threshold: usize) -> bool {
    for t in sys.trees() {
        for v in t.nodes() {
            let mut counts: HashMap<usize, usize> = HashMap::new();
            let mut used = HashSet::new();
            for x in t.ancestors(v) {
                if gamma_d.is_some_and(|p| !used.insert(p.block_of(x))) {
                    break;
                }
                let c = counts.entry(cells.block_of(x)).or_insert(0);
                *c += 1;
                if *c >= threshold {
                    return true;
                }
            }
        }
    }
    false
}

fn reznichenko(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let params = ReznParams {
        rng_seed: cfg.seed,
        ..ReznParams::default()
    };
    let sys = build(&params)?;
    let report = verify_system(&sys, 10_000, cfg.seed);
    let g = sys.ground().clone();
    let (mut agree, mut feasible, mut fan) = (0, 0, 0);
    for _ in 0..100 {
        let k = rng.random_range(1..=6);
        let cells = random_partition(rng, &g, k);
        let gamma_d = if rng.random_bool(0.5) {
            let k = rng.random_range(64..=1024);
            Some(random_partition(rng, &g, k))
        } else {
            None
        };
        let threshold = rng.random_range(1..=10);
        let expected = segment_feasible(&sys, &cells, gamma_d.as_ref(), threshold);
        let found = partition_search(&sys, &cells, gamma_d.as_ref(), threshold, cfg.budgets.segment)?;
        let valid = found
            .as_ref()
            .is_none_or(|w| w.verify(&sys, &cells, gamma_d.as_ref(), threshold));
        feasible += expected as usize;
        fan += found
            .as_ref()
            .is_some_and(|w| w.method == jsnorm_core::reznichenko::SearchMethod::GreedyFan) as usize;
        if found.is_some() == expected && valid {
            agree += 1;
        }
    }
    let sizes: Vec<usize> = sys.trees().iter().map(|t| t.len()).collect();
    Ok((
        report.passed() && agree == 100,
        json!({
            "tree_sizes": sizes,
            "verification": report.to_json(),
            "instances": 100,
            "feasible": feasible,
            "found_by_fan": fan,
            "agreements": agree,
        }),
    ))
}

fn saturation(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let (mut mismatches, mut unverified, mut blocks_total) = (0, 0, 0);
    for _ in 0..200 {
        let n_gamma = rng.random_range(1..=250);
        let n_delta = rng.random_range(1..=250);
        let gamma = GroundSet::new((0..n_gamma).map(|i| format!("g{i:03}")))?;
        let delta = GroundSet::new((0..n_delta).map(|i| format!("d{i:03}")))?;
        let mut supports: Vec<Vec<u32>> = (0..n_delta)
            .map(|_| (0..rng.random_range(1..=3)).map(|_| rng.random_range(0..n_gamma)).collect())
            .collect();
        let covered: HashSet<u32> = supports.iter().flatten().copied().collect();
        for gi in 0..n_gamma {
            if !covered.contains(&gi) {
                supports[rng.random_range(0..n_delta as usize)].push(gi);
            }
        }
        let supports: Vec<AtomSet> = supports.into_iter().map(AtomSet::from_indices).collect();
        let r = saturation_partition(&gamma, &delta, &supports)?;
        blocks_total += r.blocks.len();
        if !r.verify(&gamma, &delta, &supports) {
            unverified += 1;
        }

        // Nodes 0..n_gamma are gamma atoms, the rest deltas.
        let offset = n_gamma as usize;
        let mut uf = UnionFind::<usize>::new(offset + n_delta as usize);
        for (d, s) in supports.iter().enumerate() {
            for gi in s.iter() {
                uf.union(gi as usize, offset + d);
            }
        }
        let labels = uf.into_labeling();
        let mut components: HashMap<usize, (Vec<u32>, Vec<u32>)> = HashMap::new();
        for (node, &root) in labels.iter().enumerate() {
            let entry = components.entry(root).or_default();
            if node < offset {
                entry.0.push(node as u32);
            } else {
                entry.1.push((node - offset) as u32);
            }
        }
        let expected: BTreeSet<(AtomSet, AtomSet)> = components
            .into_values()
            .map(|(g, d)| (AtomSet::from_indices(g), AtomSet::from_indices(d)))
            .collect();
        let got: BTreeSet<(AtomSet, AtomSet)> = r.blocks.iter().map(|b| (b.gamma.clone(), b.delta.clone())).collect();
        if expected != got || got.len() != r.blocks.len() {
            mismatches += 1;
        }
    }
    Ok((
        mismatches + unverified == 0,
        json!({ "maps": 200, "blocks": blocks_total, "component_mismatches": mismatches, "orthogonality_failures": unverified }),
    ))
}

/// A CLI invocation with the input files it reads, by file name.
#[derive(Clone, Debug)]
pub struct DeterminismCase {
    pub args: Vec<String>,
    pub files: Vec<(String, String)>,
}

fn file(name: &str, v: Value) -> (String, String) {
    (name.to_string(), serde_json::to_string_pretty(&v).expect("inputs serialize"))
}

fn case(args: &str, files: &[(String, String)]) -> DeterminismCase {
    DeterminismCase {
        args: std::iter::once("jsnorm").chain(args.split_whitespace()).map(String::from).collect(),
        files: files.to_vec(),
    }
}

/// One invocation per command (two for `norm`), on small inputs.
pub fn determinism_cases() -> Result<Vec<DeterminismCase>, Error> {
    let (tree, family) = segments(2)?;
    let g = family.ground().clone();
    let vector: Vec<(u32, Rational)> = (0..g.len() as u32).map(|a| (a, ratio(a as i64 % 5 - 2, 3))).collect();
    let phi = FinVector::from_indexed(&g, vector)?;
    let dyadic = [
        file("family.json", fio::family_to_json(&family)),
        file("tree.json", fio::tree_to_json(&tree)),
        file("vector.json", fio::vector_to_json(&phi)),
        file("sets.json", json!([["0:0", "1:0"], ["1:0", "2:1"], ["2:3"]])),
    ];

    let grid = SeqGrid::new(3, 2, 64)?;
    let (adm, strata) = admissible_family(&grid, 3, 10_000)?;
    let weighted = eberleinize(&adm, &strata)?;
    let ga = adm.ground().clone();
    let adm_vector: Vec<(u32, Rational)> = (0..ga.len() as u32).map(|a| (a, ratio(1, (a % 3 + 1) as i64))).collect();
    let by_last: Vec<Vec<String>> = (0..3)
        .map(|d| ga.atoms().iter().filter(|a| a.ends_with(&d.to_string())).cloned().collect())
        .collect();
    let by_first: Vec<Vec<String>> = (0..3)
        .map(|d| ga.atoms().iter().filter(|a| a.starts_with(&d.to_string())).cloned().collect())
        .collect();
    let talagrand = [
        file("weighted.json", fio::weighted_to_json(&ga, &weighted)),
        file("adm-vector.json", fio::vector_to_json(&FinVector::from_indexed(&ga, adm_vector)?)),
        file("adm.json", fio::family_to_json(&adm)),
        file("strata.json", fio::strata_to_json(&adm, &strata)),
        file("by-last.json", json!({ "blocks": by_last })),
        file("by-first.json", json!({ "blocks": by_first })),
        file("supports.json", json!({ "d1": ["a", "b"], "d2": ["c"], "d3": ["b", "d"] })),
    ];

    let rezn = "--trees 3 --stages 6 --pool 8";
    let parity: Vec<Vec<String>> = (0..2)
        .map(|r| {
            (0..6)
                .flat_map(|xi| (0..8).map(move |t| (xi, t)))
                .filter(|&(xi, _)| xi % 2 == r)
                .map(|(xi, t)| node_name(xi, t))
                .collect()
        })
        .collect();
    let rezn_files = [file("parity.json", json!({ "blocks": parity }))];

    Ok(vec![
        case("check-ci --family family.json", &dyadic),
        case("norm --family family.json --vector vector.json", &dyadic),
        case("norm --tree tree.json --vector vector.json --method tree-dp --precision 20", &dyadic),
        case("norm-re --weighted weighted.json --vector adm-vector.json", &talagrand),
        case("disjointify --family family.json --sets sets.json", &dyadic),
        case(&format!("build-reznichenko {rezn} --seed 7"), &[]),
        case(&format!("search-partition {rezn} --seed 7 --partition parity.json --threshold 2"), &rezn_files),
        case(
            "qe-search --family adm.json --partition by-first.json --gamma-d by-last.json --threshold 2",
            &talagrand,
        ),
        case("eberleinize --family adm.json --strata strata.json", &talagrand),
        case("eberleinize --base 3 --length 2 --max-size 2", &[]),
        case("saturate --supports supports.json", &talagrand),
        case("generate admissible --base 3 --length 2 --max-size 2", &[]),
        case(&format!("generate signature-partition {rezn}"), &[]),
    ])
}

/// Runs a case in-process, reading its files from memory.
pub fn run_case(c: &DeterminismCase) -> Result<(u8, String), clap::Error> {
    let cli = Cli::try_parse_from(&c.args)?;
    let load = |p: &Path| -> io::Result<String> {
        let name = p.to_string_lossy();
        c.files
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| text.clone())
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, format!("no such input `{name}`")))
    };
    let out = run_with_cap(&cli, &load, None);
    Ok((out.status.code(), out.render()))
}

fn determinism(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<(bool, Value), Error> {
    let cases = determinism_cases()?;
    let mut differing = Vec::new();
    let mut statuses = Vec::new();
    for c in &cases {
        let first = run_case(c).map_err(|e| Error::InvalidParams(e.to_string()))?;
        let second = run_case(c).map_err(|e| Error::InvalidParams(e.to_string()))?;
        statuses.push(json!([c.args[1..].join(" "), first.0]));
        if first != second {
            differing.push(c.args[1..].join(" "));
        }
    }
    Ok((
        differing.is_empty(),
        json!({ "invocations": cases.len(), "differing": differing, "exit_codes": statuses }),
    ))
}
