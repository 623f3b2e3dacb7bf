use std::collections::BTreeMap;
use std::fmt::Display;
use std::io;
use std::path::Path;

use serde_json::{json, Value};

use jsnorm_core::ci::{check_ci, disjointify_with, CiConfig, Envelope, DEFAULT_PAIR_BUDGET};
use jsnorm_core::family::{
    branches_and_tails, dyadic_tree, tree_segments, Partition, SetFamily, DEFAULT_NODE_LIMIT,
};
use jsnorm_core::io as fio;
use jsnorm_core::norm::{
    norm_oracle, norm_tree_dp, norm_weighted, NormConfig, DEFAULT_ORACLE_LIMIT, DEFAULT_STATE_BUDGET,
};
use jsnorm_core::rational::format;
use jsnorm_core::reznichenko::{
    build, level_signature_partition, partition_search, segment_family, verify_system, ReznSystem,
    DEFAULT_SEGMENT_BUDGET,
};
use jsnorm_core::talagrand::{
    admissible_family, eberleinize, qe_partition_search, saturation_partition, SeqGrid, Strata,
    DEFAULT_FAMILY_LIMIT, DEFAULT_GRID_LIMIT,
};
use jsnorm_core::Error;

use crate::app::{AdmissibleArgs, Cli, Command, Common, Generate, MethodArg, ReznArgs};
use crate::suite::{run_suite, SuiteConfig};

pub const BUDGET_OVERRIDE_ENV: &str = "JSNORM_BUDGET_OVERRIDE";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    Usage,
    Resource,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Usage => 2,
            Status::Resource => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Usage => "usage-error",
            Status::Resource => "resource-error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub report: Value,
}

impl Outcome {
    /// Canonical rendering: sorted keys, two-space indentation, trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

enum Failure {
    Usage(String),
    Resource(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

type Step<T> = std::result::Result<T, Failure>;

struct Done {
    result: Value,
    passed: bool,
}

impl Done {
    fn ok(result: Value) -> Step<Done> {
        Ok(Done { result, passed: true })
    }
}

/// Resource limits after applying the override cap.
#[derive(Clone, Debug)]
pub struct Budgets {
    pub oracle_limit: usize,
    pub state_budget: usize,
    pub family: u64,
    pub grid: u64,
    pub segment: u64,
    pub pair: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            state_budget: DEFAULT_STATE_BUDGET,
            family: DEFAULT_FAMILY_LIMIT,
            grid: DEFAULT_GRID_LIMIT,
            segment: DEFAULT_SEGMENT_BUDGET,
            pair: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl Budgets {
    fn resolve(common: &Common, cap: Option<&str>) -> Step<Budgets> {
        let cap = match cap {
            None => u64::MAX,
            Some(text) => text
                .trim()
                .parse::<u64>()
                .map_err(|_| Failure::Usage(format!("{BUDGET_OVERRIDE_ENV} must be a non-negative integer, got `{text}`")))?,
        };
        let named = [
            ("oracle limit", common.oracle_limit),
            ("state budget", common.state_budget),
            ("family budget", common.family_budget),
            ("grid budget", common.grid_budget),
            ("segment budget", common.segment_budget),
            ("pair budget", common.pair_budget),
        ];
        let mut v = [0u64; 6];
        for (slot, (name, value)) in v.iter_mut().zip(named) {
            *slot = value.min(cap);
            if *slot == 0 {
                return Err(Failure::Resource(format!("{name} must be positive")));
            }
        }
        Ok(Budgets {
            oracle_limit: v[0] as usize,
            state_budget: v[1] as usize,
            family: v[2],
            grid: v[3],
            segment: v[4],
            pair: v[5],
        })
    }

    fn norm(&self) -> NormConfig {
        NormConfig {
            oracle_limit: self.oracle_limit,
            state_budget: self.state_budget,
        }
    }
}

struct Ctx<'a> {
    load: &'a dyn Fn(&Path) -> io::Result<String>,
    inputs: BTreeMap<String, Value>,
    budgets: Budgets,
    precision: u32,
    seed: u64,
}

impl Ctx<'_> {
    /// Loads a JSON input, unwrapping the `result` of a report if given one.
    fn json(&mut self, flag: &str, path: &Path) -> Step<Value> {
        let text = (self.load)(path).map_err(|e| Failure::Usage(format!("--{flag} {}: {e}", path.display())))?;
        let mut v = fio::parse_json(flag, &text).map_err(usage)?;
        if v.get("command").is_some() {
            if let Some(r) = v.get_mut("result") {
                v = r.take();
            }
        }
        self.inputs.insert(flag.to_string(), v.clone());
        Ok(v)
    }

    fn family(&mut self, path: &Path) -> Step<SetFamily> {
        fio::family_from_json(&self.json("family", path)?).map_err(usage)
    }

    fn partition(&mut self, flag: &str, path: &Path, family: &SetFamily) -> Step<Partition> {
        fio::partition_from_json(&self.json(flag, path)?, family.ground()).map_err(usage)
    }

    fn admissible(&self, grid: &AdmissibleArgs) -> Step<(SetFamily, Strata)> {
        let (Some(base), Some(length), Some(max_size)) = (grid.base, grid.length, grid.max_size) else {
            return Err(Failure::Usage("--base, --length and --max-size are required together".into()));
        };
        let g = SeqGrid::new(base, length, self.budgets.grid).map_err(grid_error)?;
        Ok(admissible_family(&g, max_size, self.budgets.family)?)
    }

    fn rezn(&self, rezn: &ReznArgs) -> Step<ReznSystem> {
        let params = rezn.params(self.seed);
        params.validate().map_err(usage)?;
        Ok(build(&params)?)
    }
}

fn grid_error(e: Error) -> Failure {
    if e.is_resource() {
        e.into()
    } else {
        usage(e)
    }
}

/// Runs one command, reading input files through `load`.
pub fn run(cli: &Cli, load: &dyn Fn(&Path) -> io::Result<String>) -> Outcome {
    let cap = std::env::var(BUDGET_OVERRIDE_ENV).ok();
    run_with_cap(cli, load, cap.as_deref())
}

pub fn run_with_cap(cli: &Cli, load: &dyn Fn(&Path) -> io::Result<String>, cap: Option<&str>) -> Outcome {
    let command = cli.command.name();
    let mut inputs = BTreeMap::new();
    let outcome = Budgets::resolve(&cli.common, cap).and_then(|budgets| {
        let mut ctx = Ctx {
            load,
            inputs: BTreeMap::new(),
            budgets,
            precision: cli.common.precision,
            seed: cli.common.seed,
        };
        let r = dispatch(&cli.command, &mut ctx);
        inputs = ctx.inputs;
        r
    });
    let replay = || {
        json!({
            "args": serde_json::to_value(&cli.command).expect("arguments serialize"),
            "seed": cli.common.seed,
            "files": inputs,
        })
    };
    let (status, body) = match outcome {
        Ok(d) if d.passed => (Status::Ok, json!({ "result": d.result })),
        Ok(d) => (Status::Failed, json!({ "result": d.result, "inputs": replay() })),
        Err(Failure::Domain(e)) => (Status::Failed, json!({ "error": e, "inputs": replay() })),
        Err(Failure::Usage(e)) => (Status::Usage, json!({ "error": e })),
        Err(Failure::Resource(e)) => (Status::Resource, json!({ "error": e })),
    };
    let mut report = body;
    report["command"] = json!(command);
    report["status"] = json!(status.label());
    Outcome { status, report }
}

fn names(family: &SetFamily, sets: &[jsnorm_core::AtomSet]) -> Vec<Vec<String>> {
    sets.iter().map(|s| family.names(s)).collect()
}

fn dispatch(command: &Command, ctx: &mut Ctx) -> Step<Done> {
    match command {
        Command::CheckCi(a) => {
            let family = ctx.family(&a.family)?;
            let envelope = match &a.envelope {
                Some(p) => fio::envelope_from_json(&ctx.json("envelope", p)?, &family).map_err(usage)?,
                None => Envelope::Identity,
            };
            let cfg = CiConfig {
                sample_bound: a.sample_bound,
                residual_bound: a.residual_bound,
                exact_cover_limit: a.exact_cover_limit,
                pair_budget: ctx.budgets.pair,
            };
            let report = check_ci(&family, &envelope, &cfg)?;
            if let Some(e) = report.resource_error() {
                return Err(e.into());
            }
            let mut result = report.to_json(&family);
            if !report.passed() {
                result["witnesses_replay"] = json!(report.witnesses_replay(&family, &envelope, &cfg)?);
            }
            Ok(Done {
                result,
                passed: report.passed(),
            })
        }

        Command::Norm(a) => {
            let (family, tree) = match &a.tree {
                Some(p) => {
                    let tree = fio::tree_from_json(&ctx.json("tree", p)?).map_err(usage)?;
                    (tree_segments(&tree), Some(tree))
                }
                None => {
                    let p = a.family.as_ref().ok_or_else(|| usage("--family or --tree is required"))?;
                    (ctx.family(p)?, None)
                }
            };
            let phi = fio::vector_from_json(&ctx.json("vector", &a.vector)?, family.ground()).map_err(usage)?;
            let method = a.method.unwrap_or(match tree {
                Some(_) if phi.support().len() > ctx.budgets.oracle_limit => MethodArg::TreeDp,
                _ => MethodArg::Oracle,
            });
            let r = match (method, &tree) {
                (MethodArg::Oracle, _) => norm_oracle(&family, &phi, &ctx.budgets.norm())?,
                (MethodArg::TreeDp, Some(t)) => norm_tree_dp(t, &phi)?,
                (MethodArg::TreeDp, None) => return Err(usage("--method tree-dp needs --tree")),
            };
            Done::ok(json!({
                "norm_sq": format(&r.norm_sq),
                "norm_decimal": r.norm(ctx.precision),
                "witness": names(&family, &r.witness),
                "method": r.method.to_string(),
            }))
        }

        Command::NormRe(a) => {
            let (ground, sets) = fio::weighted_from_json(&ctx.json("weighted", &a.weighted)?).map_err(usage)?;
            let phi = fio::vector_from_json(&ctx.json("vector", &a.vector)?, &ground).map_err(usage)?;
            let r = norm_weighted(&sets, &phi, &ctx.budgets.norm())?;
            Done::ok(json!({
                "norm_sq": format(&r.norm_sq),
                "norm_decimal": r.norm(ctx.precision),
                "witness": r.witness,
                "method": "oracle",
            }))
        }

        Command::Disjointify(a) => {
            let family = ctx.family(&a.family)?;
            let raw: Vec<Vec<String>> =
                serde_json::from_value(ctx.json("sets", &a.sets)?).map_err(|e| usage(format!("sets: {e}")))?;
            let sets = raw
                .iter()
                .map(|s| family.ground().set_of(s))
                .collect::<jsnorm_core::Result<Vec<_>>>()
                .map_err(usage)?;
            let d = disjointify_with(&family, &sets, a.exact_cover_limit)?;
            Done::ok(json!({ "parts": names(&family, &d.parts) }))
        }

        Command::BuildReznichenko(a) => {
            let sys = ctx.rezn(&a.rezn)?;
            let report = verify_system(&sys, a.verify_sample, ctx.seed);
            Ok(Done {
                result: json!({ "system": sys.to_json(), "verification": report.to_json() }),
                passed: report.passed(),
            })
        }

        Command::SearchPartition(a) => {
            let sys = match &a.system {
                Some(p) => {
                    let mut v = ctx.json("system", p)?;
                    if let Some(s) = v.get_mut("system") {
                        v = s.take();
                    }
                    ReznSystem::from_json(&v).map_err(usage)?
                }
                None => ctx.rezn(&a.rezn)?,
            };
            let cells = fio::partition_from_json(&ctx.json("partition", &a.partition)?, sys.ground()).map_err(usage)?;
            let gamma_d = match &a.gamma_d {
                Some(p) => Some(fio::partition_from_json(&ctx.json("gamma-d", p)?, sys.ground()).map_err(usage)?),
                None => None,
            };
            let found = partition_search(&sys, &cells, gamma_d.as_ref(), a.threshold as usize, ctx.budgets.segment)?;
            let g = sys.ground();
            let witness = found.as_ref().map(|w| {
                json!({
                    "segment": g.names(&w.segment),
                    "tree": w.tree,
                    "cell": w.cell,
                    "cell_atoms": g.names(&cells.blocks()[w.cell]),
                    "count": w.count,
                    "method": w.method.to_string(),
                    "fan_cells": w.fan_cells,
                })
            });
            Ok(Done {
                result: json!({ "found": found.is_some(), "witness": witness, "threshold": a.threshold }),
                passed: found.is_some(),
            })
        }

        Command::QeSearch(a) => {
            let family = match &a.family {
                Some(p) => ctx.family(p)?,
                None => ctx.admissible(&a.grid)?.0,
            };
            let gamma_n = ctx.partition("partition", &a.partition, &family)?;
            let gamma_d = ctx.partition("gamma-d", &a.gamma_d, &family)?;
            let found = qe_partition_search(&family, &gamma_d, &gamma_n, a.threshold as usize)?;
            let witness = found.as_ref().map(|w| {
                json!({
                    "s": family.names(&w.s),
                    "n0": w.n0,
                    "intersection": family.names(&w.intersection),
                    "per_d_counts": w.per_d_counts,
                })
            });
            Ok(Done {
                result: json!({ "found": found.is_some(), "witness": witness, "threshold": a.threshold }),
                passed: found.is_some(),
            })
        }

        Command::Eberleinize(a) => {
            let (family, strata) = match (&a.family, &a.strata) {
                (Some(f), Some(s)) => {
                    let family = ctx.family(f)?;
                    let strata = fio::strata_from_json(&ctx.json("strata", s)?, &family).map_err(usage)?;
                    (family, strata)
                }
                _ => ctx.admissible(&a.grid)?,
            };
            let weighted = eberleinize(&family, &strata)?;
            Done::ok(fio::weighted_to_json(family.ground(), &weighted))
        }

        Command::Saturate(a) => {
            let gamma = match &a.gamma {
                Some(p) => Some(fio::ground_from_json(&ctx.json("gamma", p)?).map_err(usage)?),
                None => None,
            };
            let (gamma, delta, supports) =
                fio::supports_from_json(&ctx.json("supports", &a.supports)?, gamma.as_ref()).map_err(usage)?;
            let r = saturation_partition(&gamma, &delta, &supports)?;
            let verified = r.verify(&gamma, &delta, &supports);
            let blocks: Vec<Value> = r
                .blocks
                .iter()
                .map(|b| json!({ "gamma": gamma.names(&b.gamma), "delta": delta.names(&b.delta), "rounds": b.rounds }))
                .collect();
            Ok(Done {
                result: json!({ "blocks": blocks, "verified": verified }),
                passed: verified,
            })
        }

        Command::Suite => {
            let cfg = SuiteConfig {
                seed: ctx.seed,
                budgets: ctx.budgets.clone(),
            };
            let report = run_suite(&cfg);
            Ok(Done {
                passed: report.passed(),
                result: report.to_json(),
            })
        }

        Command::Generate(g) => generate(g, ctx),
    }
}

fn generate(g: &Generate, ctx: &mut Ctx) -> Step<Done> {
    let dyadic = |depth: u32| dyadic_tree(depth, DEFAULT_NODE_LIMIT.min(ctx.budgets.family)).map_err(grid_error);
    match g {
        Generate::DyadicSegments { depth } => Done::ok(fio::family_to_json(&tree_segments(&dyadic(*depth)?))),
        Generate::BranchesTails { depth } => Done::ok(fio::family_to_json(&branches_and_tails(&dyadic(*depth)?))),
        Generate::DyadicTree { depth } => Done::ok(fio::tree_to_json(&dyadic(*depth)?)),
        Generate::Admissible { base, length, max_size } => {
            let grid = AdmissibleArgs {
                base: Some(*base),
                length: Some(*length),
                max_size: Some(*max_size),
            };
            let (family, strata) = ctx.admissible(&grid)?;
            let mut out = fio::family_to_json(&family);
            out["strata"] = fio::strata_to_json(&family, &strata);
            Done::ok(out)
        }
        Generate::ReznichenkoSegments { rezn, adjoin_ground } => {
            let sys = ctx.rezn(rezn)?;
            let family = segment_family(&sys, *adjoin_ground, ctx.budgets.segment)?;
            Done::ok(fio::family_to_json(&family))
        }
        Generate::SignaturePartition { rezn } => {
            let sys = ctx.rezn(rezn)?;
            Done::ok(fio::partition_to_json(&level_signature_partition(&sys)))
        }
    }
}
