use crate::error::{Error, Result};
use crate::family::{AtomSet, Ground};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationBlock {
    pub gamma: AtomSet,
    pub delta: AtomSet,
    /// Closure rounds until the block stopped growing.
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationResult {
    pub blocks: Vec<SaturationBlock>,
}

/// Splits `gamma` and `delta` into matched blocks with `f_delta(gamma) = 0` across blocks.
///
/// `supports[i]` is the support (in `gamma`) of the `i`-th atom of `delta`. Blocks are grown by
/// alternating closure from the smallest unassigned delta and listed in that order.
pub fn saturation_partition(gamma: &Ground, delta: &Ground, supports: &[AtomSet]) -> Result<SaturationResult> {
    if supports.len() != delta.len() {
        return Err(Error::InvalidParams(format!(
            "{} supports given for {} deltas",
            supports.len(),
            delta.len()
        )));
    }
    for (i, s) in supports.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptySupport(delta.atom(i as u32).to_string()));
        }
        if let Some(bad) = s.iter().find(|&a| a as usize >= gamma.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad as usize,
                max: gamma.len() - 1,
            });
        }
    }
    let mut hitters: Vec<Vec<u32>> = vec![Vec::new(); gamma.len()];
    for (d, s) in supports.iter().enumerate() {
        for g in s.iter() {
            hitters[g as usize].push(d as u32);
        }
    }
    if let Some(g) = hitters.iter().position(Vec::is_empty) {
        return Err(Error::UncoveredGamma(gamma.atom(g as u32).to_string()));
    }

    let mut assigned = vec![false; delta.len()];
    let mut blocks = Vec::new();
    for start in 0..delta.len() {
        if assigned[start] {
            continue;
        }
        let mut in_gamma = vec![false; gamma.len()];
        let mut deltas = vec![start as u32];
        assigned[start] = true;
        let mut frontier = vec![start as u32];
        let mut rounds = 0;
        while !frontier.is_empty() {
            rounds += 1;
            let mut fresh_gamma = Vec::new();
            for &d in &frontier {
                for g in supports[d as usize].iter() {
                    if !in_gamma[g as usize] {
                        in_gamma[g as usize] = true;
                        fresh_gamma.push(g);
                    }
                }
            }
            let mut next = Vec::new();
            for g in fresh_gamma {
                for &d in &hitters[g as usize] {
                    if !assigned[d as usize] {
                        assigned[d as usize] = true;
                        next.push(d);
                    }
                }
            }
            deltas.extend(&next);
            frontier = next;
        }
        let gamma_block: AtomSet = (0..gamma.len() as u32).filter(|&g| in_gamma[g as usize]).collect();
        blocks.push(SaturationBlock {
            gamma: gamma_block,
            delta: AtomSet::from_indices(deltas),
            rounds,
        });
    }
    Ok(SaturationResult { blocks })
}

impl SaturationResult {
    /// Checks cover, disjointness and cross-block orthogonality exhaustively.
    pub fn verify(&self, gamma: &Ground, delta: &Ground, supports: &[AtomSet]) -> bool {
        let mut gamma_block = vec![usize::MAX; gamma.len()];
        let mut delta_block = vec![usize::MAX; delta.len()];
        for (i, b) in self.blocks.iter().enumerate() {
            for g in b.gamma.iter() {
                if gamma_block[g as usize] != usize::MAX {
                    return false;
                }
                gamma_block[g as usize] = i;
            }
            for d in b.delta.iter() {
                if delta_block[d as usize] != usize::MAX {
                    return false;
                }
                delta_block[d as usize] = i;
            }
        }
        let covered = gamma_block.iter().chain(&delta_block).all(|&b| b != usize::MAX);
        covered
            && supports
                .iter()
                .enumerate()
                .all(|(d, s)| s.iter().all(|g| gamma_block[g as usize] == delta_block[d]))
    }
}
