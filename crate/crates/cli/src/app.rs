use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use jsnorm_core::ci::{DEFAULT_EXACT_COVER_LIMIT, DEFAULT_PAIR_BUDGET, DEFAULT_SAMPLE_BOUND};
use jsnorm_core::norm::{DEFAULT_ORACLE_LIMIT, DEFAULT_STATE_BUDGET};
use jsnorm_core::reznichenko::{ReznParams, DEFAULT_SEGMENT_BUDGET};
use jsnorm_core::talagrand::{DEFAULT_FAMILY_LIMIT, DEFAULT_GRID_LIMIT};

pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser, Debug, Clone)]
#[command(name = "jsnorm", version, about = "Exact set-family norms, C.I. axioms and partition searches")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Decimal digits for square roots.
    #[arg(long, global = true, default_value_t = 50, value_parser = clap::value_parser!(u32).range(10..=200))]
    pub precision: u32,
    /// Largest support handled by the packing oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_LIMIT as u64)]
    pub oracle_limit: u64,
    /// Memoized states allowed in one packing search.
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_BUDGET as u64)]
    pub state_budget: u64,
    /// Largest generated admissible family.
    #[arg(long, global = true, default_value_t = DEFAULT_FAMILY_LIMIT)]
    pub family_budget: u64,
    /// Largest sequence grid.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_LIMIT)]
    pub grid_budget: u64,
    /// Largest number of tree segments enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_BUDGET)]
    pub segment_budget: u64,
    /// Largest number of ordered pairs checked for condition (b).
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_BUDGET)]
    pub pair_budget: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check the C.I. axioms (a)-(d) of a family.
    CheckCi(CheckCiArgs),
    /// Exact James-type norm of a vector.
    Norm(NormArgs),
    /// Norm over weighted sets, e.g. an Eberleinized family.
    NormRe(NormReArgs),
    /// Rewrite a union of members as a disjoint union of members.
    Disjointify(DisjointifyArgs),
    /// Build and verify a finite Reznichenko tree system.
    BuildReznichenko(BuildArgs),
    /// Search a Reznichenko system for a segment crowding one cell of a partition.
    SearchPartition(SearchPartitionArgs),
    /// Search a family for a member crowding one cell while spreading over another partition.
    QeSearch(QeSearchArgs),
    /// Weight each stratum-n member by 1/n.
    Eberleinize(EberleinizeArgs),
    /// Matched partitions of a bipartite support relation.
    Saturate(SaturateArgs),
    /// Run the acceptance criteria.
    Suite,
    /// Write a generated input object.
    #[command(subcommand)]
    Generate(Generate),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckCi(_) => "check-ci",
            Command::Norm(_) => "norm",
            Command::NormRe(_) => "norm-re",
            Command::Disjointify(_) => "disjointify",
            Command::BuildReznichenko(_) => "build-reznichenko",
            Command::SearchPartition(_) => "search-partition",
            Command::QeSearch(_) => "qe-search",
            Command::Eberleinize(_) => "eberleinize",
            Command::Saturate(_) => "saturate",
            Command::Suite => "suite",
            Command::Generate(_) => "generate",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CheckCiArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// Envelope map file; the identity envelope when absent.
    #[arg(long)]
    pub envelope: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_BOUND)]
    pub sample_bound: usize,
    /// Maximal residual size tolerated by condition (c).
    #[arg(long)]
    pub residual_bound: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EXACT_COVER_LIMIT)]
    pub exact_cover_limit: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Oracle,
    TreeDp,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NormArgs {
    #[arg(long, required_unless_present = "tree")]
    pub family: Option<PathBuf>,
    /// Tree file; the family is then the tree's segments.
    #[arg(long, conflicts_with = "family")]
    pub tree: Option<PathBuf>,
    #[arg(long)]
    pub vector: PathBuf,
    /// Defaults to the oracle when the support fits its limit, else the tree DP when a tree is given.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NormReArgs {
    #[arg(long)]
    pub weighted: PathBuf,
    #[arg(long)]
    pub vector: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DisjointifyArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// JSON list of members, each a list of atoms.
    #[arg(long)]
    pub sets: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EXACT_COVER_LIMIT)]
    pub exact_cover_limit: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReznArgs {
    #[arg(long, default_value_t = ReznParams::default().n_trees)]
    pub trees: u32,
    #[arg(long, default_value_t = ReznParams::default().stages)]
    pub stages: u32,
    #[arg(long, default_value_t = ReznParams::default().label_pool)]
    pub pool: u32,
    #[arg(long, default_value_t = ReznParams::default().min_request_size)]
    pub min_request: u32,
}

impl ReznArgs {
    pub fn params(&self, seed: u64) -> ReznParams {
        ReznParams {
            n_trees: self.trees,
            stages: self.stages,
            label_pool: self.pool,
            rng_seed: seed,
            min_request_size: self.min_request,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BuildArgs {
    #[command(flatten)]
    pub rezn: ReznArgs,
    /// Sampled checks drawn by the verifier.
    #[arg(long, default_value_t = 10_000)]
    pub verify_sample: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SearchPartitionArgs {
    /// System file (or a build-reznichenko report); built from the parameters when absent.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[command(flatten)]
    pub rezn: ReznArgs,
    /// Partition whose cells are to be crowded.
    #[arg(long)]
    pub partition: PathBuf,
    /// Partition each of whose blocks the segment may meet at most once.
    #[arg(long)]
    pub gamma_d: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threshold: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AdmissibleArgs {
    #[arg(long, requires_all = ["length", "max_size"])]
    pub base: Option<u32>,
    #[arg(long)]
    pub length: Option<u32>,
    #[arg(long)]
    pub max_size: Option<u32>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QeSearchArgs {
    /// Family file; the admissible family of the grid when absent.
    #[arg(long, required_unless_present = "base", conflicts_with = "base")]
    pub family: Option<PathBuf>,
    #[command(flatten)]
    pub grid: AdmissibleArgs,
    /// Partition whose cells are to be crowded.
    #[arg(long)]
    pub partition: PathBuf,
    /// Partition each of whose blocks the member may meet at most once.
    #[arg(long)]
    pub gamma_d: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threshold: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EberleinizeArgs {
    #[arg(long, requires = "strata", required_unless_present = "base", conflicts_with = "base")]
    pub family: Option<PathBuf>,
    /// List of `{"member": [...], "stratum": n}` entries.
    #[arg(long)]
    pub strata: Option<PathBuf>,
    #[command(flatten)]
    pub grid: AdmissibleArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SaturateArgs {
    #[arg(long)]
    pub supports: PathBuf,
    /// JSON list of gamma atoms; the union of the supports when absent.
    #[arg(long)]
    pub gamma: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generate {
    /// Segments of the dyadic tree of a given depth.
    DyadicSegments {
        #[arg(long)]
        depth: u32,
    },
    /// Branches and tails of the dyadic tree of a given depth.
    BranchesTails {
        #[arg(long)]
        depth: u32,
    },
    /// The dyadic tree of a given depth, as a tree file.
    DyadicTree {
        #[arg(long)]
        depth: u32,
    },
    /// Admissible sets of a sequence grid with their strata.
    Admissible {
        #[arg(long)]
        base: u32,
        #[arg(long)]
        length: u32,
        #[arg(long)]
        max_size: u32,
    },
    /// Segments of a Reznichenko system.
    ReznichenkoSegments {
        #[command(flatten)]
        rezn: ReznArgs,
        /// Add every singleton of the ground set.
        #[arg(long)]
        adjoin_ground: bool,
    },
    /// Level-signature partition of a Reznichenko system.
    SignaturePartition {
        #[command(flatten)]
        rezn: ReznArgs,
    },
}
