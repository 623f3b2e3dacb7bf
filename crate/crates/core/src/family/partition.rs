use super::ground::{AtomSet, Ground};
use crate::error::{Error, Result};

/// An ordered partition of a ground set into nonempty blocks. Block indices are list positions.
#[derive(Clone, Debug)]
pub struct Partition {
    ground: Ground,
    blocks: Vec<AtomSet>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(ground: &Ground, blocks: Vec<AtomSet>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; ground.len()];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for a in block.iter() {
                let slot = block_of
                    .get_mut(a as usize)
                    .ok_or_else(|| Error::InvalidPartition(format!("atom index {a} outside the ground set")))?;
                if *slot != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "atom `{}` lies in blocks {} and {b}",
                        ground.atom(a),
                        *slot
                    )));
                }
                *slot = b;
            }
        }
        if let Some(a) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "atom `{}` is not covered",
                ground.atom(a as u32)
            )));
        }
        Ok(Partition {
            ground: ground.clone(),
            blocks,
            block_of,
        })
    }

    pub fn from_names<S: AsRef<str>>(ground: &Ground, blocks: &[Vec<S>]) -> Result<Self> {
        let sets = blocks.iter().map(|b| ground.set_of(b)).collect::<Result<Vec<_>>>()?;
        Self::new(ground, sets)
    }

    /// One block per atom.
    pub fn singletons(ground: &Ground) -> Self {
        let blocks = (0..ground.len() as u32).map(AtomSet::singleton).collect();
        Self::new(ground, blocks).expect("singletons partition their ground")
    }

    pub fn whole(ground: &Ground) -> Self {
        Self::new(ground, vec![ground.full_set()]).expect("one block covers the ground")
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn blocks(&self) -> &[AtomSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, atom: u32) -> usize {
        self.block_of[atom as usize]
    }

    pub fn names(&self) -> Vec<Vec<String>> {
        self.blocks.iter().map(|b| self.ground.names(b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::GroundSet;

    #[test]
    fn validates_cover_and_disjointness() {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        let p = Partition::from_names(&g, &[vec!["c"], vec!["a", "b"]]).unwrap();
        assert_eq!(p.block_of(0), 1);
        assert_eq!(p.block_of(2), 0);
        assert!(Partition::from_names(&g, &[vec!["a", "b"]]).is_err());
        assert!(Partition::from_names(&g, &[vec!["a", "b"], vec!["b", "c"]]).is_err());
        assert!(Partition::from_names::<&str>(&g, &[vec!["a", "b", "c"], vec![]]).is_err());
        assert_eq!(Partition::singletons(&g).len(), 3);
        assert_eq!(Partition::whole(&g).len(), 1);
    }
}
