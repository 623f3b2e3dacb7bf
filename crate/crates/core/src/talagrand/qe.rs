use crate::error::{Error, Result};
use crate::family::{same_ground, AtomSet, Partition, SetFamily};

/// A member meeting one `gamma_n` cell in at least `threshold` atoms while meeting every
/// `gamma_d` block at most once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QePartitionWitness {
    pub s: AtomSet,
    pub n0: usize,
    pub intersection: AtomSet,
    /// `(block index, #(s ∩ block))` for every `gamma_d` block that `s` meets.
    pub per_d_counts: Vec<(usize, usize)>,
}

/// Scans members in canonical order and returns the first witness, or `None` when no member
/// qualifies.
pub fn qe_partition_search(
    family: &SetFamily,
    gamma_d: &Partition,
    gamma_n: &Partition,
    threshold: usize,
) -> Result<Option<QePartitionWitness>> {
    if !same_ground(family.ground(), gamma_d.ground()) || !same_ground(family.ground(), gamma_n.ground()) {
        return Err(Error::InvalidPartition("partitions must cover the family's ground set".into()));
    }
    if threshold == 0 {
        return Err(Error::InvalidParams("threshold must be at least 1".into()));
    }
    for s in family.members() {
        if s.len() < threshold {
            continue;
        }
        let mut counts: Vec<(usize, usize)> = Vec::new();
        for a in s.iter() {
            let d = gamma_d.block_of(a);
            match counts.iter_mut().find(|(b, _)| *b == d) {
                Some(c) => c.1 += 1,
                None => counts.push((d, 1)),
            }
        }
        if counts.iter().any(|&(_, c)| c > 1) {
            continue;
        }
        counts.sort_unstable();
        let hit = gamma_n
            .blocks()
            .iter()
            .enumerate()
            .map(|(n, block)| (n, s.intersection(block)))
            .find(|(_, inter)| inter.len() >= threshold);
        if let Some((n0, intersection)) = hit {
            return Ok(Some(QePartitionWitness {
                s: s.clone(),
                n0,
                intersection,
                per_d_counts: counts,
            }));
        }
    }
    Ok(None)
}

impl QePartitionWitness {
    pub fn verify(&self, family: &SetFamily, gamma_d: &Partition, gamma_n: &Partition, threshold: usize) -> bool {
        family.contains(&self.s)
            && self.n0 < gamma_n.len()
            && self.intersection == self.s.intersection(&gamma_n.blocks()[self.n0])
            && self.intersection.len() >= threshold
            && gamma_d.blocks().iter().all(|b| self.s.intersection(b).len() <= 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::talagrand::{admissible_family, SeqGrid, DEFAULT_FAMILY_LIMIT, DEFAULT_GRID_LIMIT};

    #[test]
    fn search_examples() {
        let g = SeqGrid::new(4, 2, DEFAULT_GRID_LIMIT).unwrap();
        let (f, _) = admissible_family(&g, 4, DEFAULT_FAMILY_LIMIT).unwrap();
        let points = Partition::singletons(g.ground());
        let whole = Partition::whole(g.ground());

        let w = qe_partition_search(&f, &points, &whole, 4).unwrap().unwrap();
        assert_eq!(w.s.len(), 4);
        assert_eq!(w.n0, 0);
        assert!(w.per_d_counts.iter().all(|&(_, c)| c == 1));
        assert!(w.verify(&f, &points, &whole, 4));

        assert_eq!(qe_partition_search(&f, &points, &whole, 5).unwrap(), None);
        assert_eq!(qe_partition_search(&f, &whole, &whole, 2).unwrap(), None);
        assert!(qe_partition_search(&f, &whole, &whole, 0).is_err());
    }
}
