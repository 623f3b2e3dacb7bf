//! JSON file formats. Rationals are `"p/q"` strings, atoms are plain strings, and all maps are
//! written with sorted keys.

use std::collections::{BTreeMap, HashMap};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::ci::Envelope;
use crate::error::{Error, Result};
use crate::family::{AtomSet, FinVector, FiniteTree, Ground, GroundSet, Partition, Provenance, SetFamily, WeightedSet};
use crate::rational;
use crate::talagrand::Strata;

fn decode<T: DeserializeOwned>(what: &str, v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Parses JSON text, tagging errors with `what`.
pub fn parse_json(what: &str, text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn ground_to_json(g: &Ground) -> Value {
    json!(g.atoms())
}

pub fn ground_from_json(v: &Value) -> Result<Ground> {
    GroundSet::new(decode::<Vec<String>>("ground", v)?)
}

/// Extra keys, such as the strata of a generated admissible family, are ignored.
#[derive(Deserialize)]
struct FamilyFile {
    ground: Vec<String>,
    members: Vec<Vec<String>>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

pub fn family_to_json(f: &SetFamily) -> Value {
    json!({
        "ground": ground_to_json(f.ground()),
        "members": f.members().iter().map(|m| f.names(m)).collect::<Vec<_>>(),
        "provenance": f.provenance(),
    })
}

pub fn family_from_json(v: &Value) -> Result<SetFamily> {
    let file: FamilyFile = decode("family", v)?;
    let ground = GroundSet::new(file.ground)?;
    SetFamily::from_names(&ground, &file.members, file.provenance.unwrap_or(Provenance::Explicit))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorFile {
    entries: BTreeMap<String, String>,
}

pub fn vector_to_json(phi: &FinVector) -> Value {
    let entries: BTreeMap<&str, String> = phi
        .entries()
        .map(|(a, q)| (phi.ground().atom(a), rational::format(q)))
        .collect();
    json!({ "entries": entries })
}

pub fn vector_from_json(v: &Value, ground: &Ground) -> Result<FinVector> {
    let file: VectorFile = decode("vector", v)?;
    let entries = file
        .entries
        .iter()
        .map(|(a, q)| rational::parse(q).map(|q| (a.as_str(), q)))
        .collect::<Result<Vec<_>>>()?;
    FinVector::from_named(ground, entries)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    nodes: Vec<String>,
    parent: BTreeMap<String, Option<String>>,
    #[serde(default)]
    forest: bool,
}

pub fn tree_to_json(t: &FiniteTree) -> Value {
    let g = t.ground();
    let parent: BTreeMap<&str, Option<&str>> = (0..g.len() as u32)
        .map(|v| (g.atom(v), t.parent(v).map(|p| g.atom(p))))
        .collect();
    json!({ "nodes": ground_to_json(g), "parent": parent, "forest": t.is_forest() })
}

/// Nodes missing from `parent` are roots.
pub fn tree_from_json(v: &Value) -> Result<FiniteTree> {
    let file: TreeFile = decode("tree", v)?;
    let ground = GroundSet::new(file.nodes)?;
    let mut parent = vec![None; ground.len()];
    for (a, p) in &file.parent {
        let i = ground.require(a)?;
        parent[i as usize] = p.as_deref().map(|p| ground.require(p)).transpose()?;
    }
    FiniteTree::from_parents(&ground, parent, file.forest)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightedFile {
    ground: Vec<String>,
    sets: Vec<BTreeMap<String, String>>,
}

pub fn weighted_to_json(ground: &Ground, sets: &[WeightedSet]) -> Value {
    let sets: Vec<BTreeMap<&str, String>> = sets
        .iter()
        .map(|g| g.weights().map(|(a, w)| (ground.atom(a), rational::format(w))).collect())
        .collect();
    json!({ "ground": ground_to_json(ground), "sets": sets })
}

pub fn weighted_from_json(v: &Value) -> Result<(Ground, Vec<WeightedSet>)> {
    let file: WeightedFile = decode("weighted sets", v)?;
    let ground = GroundSet::new(file.ground)?;
    let sets = file
        .sets
        .iter()
        .map(|m| {
            let weights = m
                .iter()
                .map(|(a, w)| Ok((ground.require(a)?, rational::parse(w)?)))
                .collect::<Result<Vec<_>>>()?;
            WeightedSet::new(&ground, weights)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ground, sets))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionFile {
    blocks: Vec<Vec<String>>,
}

pub fn partition_to_json(p: &Partition) -> Value {
    json!({ "blocks": p.names() })
}

pub fn partition_from_json(v: &Value, ground: &Ground) -> Result<Partition> {
    let file: PartitionFile = decode("partition", v)?;
    Partition::from_names(ground, &file.blocks)
}

/// A supports file `{"delta_id": [gamma atoms...]}`; returns the delta ground set and the supports
/// indexed by delta atom. With `gamma` absent, the gamma ground set is the union of the supports.
pub fn supports_from_json(v: &Value, gamma: Option<&Ground>) -> Result<(Ground, Ground, Vec<AtomSet>)> {
    let file: BTreeMap<String, Vec<String>> = decode("supports", v)?;
    let gamma = match gamma {
        Some(g) => g.clone(),
        None => {
            let mut all: Vec<&String> = file.values().flatten().collect();
            all.sort();
            all.dedup();
            GroundSet::new(all.into_iter().cloned())?
        }
    };
    let delta = GroundSet::new(file.keys().cloned())?;
    let supports = file
        .values()
        .map(|s| gamma.set_of(s))
        .collect::<Result<Vec<_>>>()?;
    Ok((gamma, delta, supports))
}

pub fn supports_to_json(gamma: &Ground, delta: &Ground, supports: &[AtomSet]) -> Value {
    let map: BTreeMap<&str, Vec<String>> = supports
        .iter()
        .enumerate()
        .map(|(d, s)| (delta.atom(d as u32), gamma.names(s)))
        .collect();
    json!(map)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeEntry {
    t: Vec<String>,
    s: Vec<String>,
}

/// `"identity"` or a list of `{"t": [...], "s": [...]}` entries.
pub fn envelope_from_json(v: &Value, family: &SetFamily) -> Result<Envelope> {
    if v.as_str() == Some("identity") {
        return Ok(Envelope::Identity);
    }
    let entries: Vec<EnvelopeEntry> = decode("envelope", v)?;
    let g = family.ground();
    let map: HashMap<AtomSet, AtomSet> = entries
        .iter()
        .map(|e| Ok((g.set_of(&e.t)?, g.set_of(&e.s)?)))
        .collect::<Result<_>>()?;
    Ok(Envelope::Explicit(map))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StratumEntry {
    member: Vec<String>,
    stratum: u32,
}

pub fn strata_to_json(family: &SetFamily, strata: &Strata) -> Value {
    let entries: Vec<Value> = strata
        .iter()
        .map(|(m, n)| json!({ "member": family.names(m), "stratum": n }))
        .collect();
    json!(entries)
}

/// Accepts the entry list itself or an object holding it under `strata`.
pub fn strata_from_json(v: &Value, family: &SetFamily) -> Result<Strata> {
    let entries: Vec<StratumEntry> = decode("strata", v.get("strata").unwrap_or(v))?;
    entries
        .iter()
        .map(|e| {
            let m = family.member_of(&e.member)?;
            if e.stratum == 0 {
                return Err(Error::Parse("strata are numbered from 1".into()));
            }
            Ok((m, e.stratum))
        })
        .collect()
}
