use super::ground::{AtomSet, Ground, GroundSet};
use super::{Provenance, SetFamily};
use crate::error::{Error, Result};

/// Largest dyadic tree (in nodes) built without an explicit limit.
pub const DEFAULT_NODE_LIMIT: u64 = 1 << 20;

/// A rooted finite tree (or forest) on the atoms of its ground set.
#[derive(Clone, Debug)]
pub struct FiniteTree {
    ground: Ground,
    parent: Vec<Option<u32>>,
    children: Vec<Vec<u32>>,
    roots: Vec<u32>,
    level: Vec<u32>,
    forest: bool,
}

impl FiniteTree {
    /// `parent[i]` is the parent of atom `i` of `ground`.
    pub fn from_parents(ground: &Ground, parent: Vec<Option<u32>>, forest: bool) -> Result<Self> {
        let n = ground.len();
        if parent.len() != n {
            return Err(Error::InvalidTree(format!(
                "{} parent entries for {} nodes",
                parent.len(),
                n
            )));
        }
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (i, p) in parent.iter().enumerate() {
            match p {
                Some(p) if *p as usize >= n => {
                    return Err(Error::InvalidTree(format!("parent index {p} out of range")))
                }
                Some(p) if *p as usize == i => {
                    return Err(Error::InvalidTree(format!("node `{}` is its own parent", ground.atom(*p))))
                }
                Some(p) => children[*p as usize].push(i as u32),
                None => roots.push(i as u32),
            }
        }
        if roots.is_empty() {
            return Err(Error::InvalidTree("no root (cycle)".into()));
        }
        if roots.len() > 1 && !forest {
            return Err(Error::InvalidTree(format!(
                "{} roots but the tree is not flagged as a forest",
                roots.len()
            )));
        }
        // Levels by BFS from the roots; nodes never reached sit on a cycle.
        let mut level = vec![u32::MAX; n];
        let mut queue: std::collections::VecDeque<u32> = roots.iter().copied().collect();
        for &r in &roots {
            level[r as usize] = 0;
        }
        while let Some(v) = queue.pop_front() {
            for &c in &children[v as usize] {
                level[c as usize] = level[v as usize] + 1;
                queue.push_back(c);
            }
        }
        if let Some(i) = level.iter().position(|&l| l == u32::MAX) {
            return Err(Error::InvalidTree(format!("node `{}` lies on a cycle", ground.atom(i as u32))));
        }
        Ok(FiniteTree {
            ground: ground.clone(),
            parent,
            children,
            roots,
            level,
            forest,
        })
    }

    /// Builds a tree from `(node, parent)` name pairs.
    pub fn from_named<S: AsRef<str>>(pairs: &[(S, Option<S>)], forest: bool) -> Result<Self> {
        let ground = GroundSet::new(pairs.iter().map(|(a, _)| a.as_ref().to_string()))?;
        let mut parent = vec![None; ground.len()];
        for (a, p) in pairs {
            let i = ground.require(a.as_ref())?;
            parent[i as usize] = match p {
                Some(p) => Some(ground.require(p.as_ref())?),
                None => None,
            };
        }
        Self::from_parents(&ground, parent, forest)
    }

    /// A chain `names[0] < names[1] < ...`.
    pub fn path<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let pairs: Vec<(String, Option<String>)> = names
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = if i == 0 { None } else { Some(names[i - 1].as_ref().to_string()) };
                (a.as_ref().to_string(), p)
            })
            .collect();
        Self::from_named(&pairs, false)
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn is_forest(&self) -> bool {
        self.forest
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent[v as usize]
    }

    pub fn parents(&self) -> &[Option<u32>] {
        &self.parent
    }

    pub fn children(&self, v: u32) -> &[u32] {
        &self.children[v as usize]
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    /// Distance from the root of `v`'s component.
    pub fn level(&self, v: u32) -> u32 {
        self.level[v as usize]
    }

    /// Length (in edges) of the longest root-to-leaf path.
    pub fn depth(&self) -> u32 {
        self.level.iter().copied().max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&v| self.children[v as usize].is_empty())
    }

    /// `v`, its parent, ..., up to the root.
    pub fn ancestors(&self, v: u32) -> Vec<u32> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur as usize] {
            out.push(p);
            cur = p;
        }
        out
    }

    /// `a <= b` in the tree order.
    pub fn is_ancestor(&self, a: u32, b: u32) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if self.level[c as usize] < self.level[a as usize] {
                return false;
            }
            if c == a {
                return true;
            }
            cur = self.parent[c as usize];
        }
        false
    }

    pub fn comparable(&self, a: u32, b: u32) -> bool {
        self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }

    /// The segment `[lo, hi]`; `lo` must be an ancestor of `hi`.
    pub fn segment(&self, lo: u32, hi: u32) -> Option<AtomSet> {
        let mut out = Vec::new();
        let mut cur = Some(hi);
        while let Some(c) = cur {
            out.push(c);
            if c == lo {
                return Some(AtomSet::from_indices(out));
            }
            cur = self.parent[c as usize];
        }
        None
    }

    /// Nodes in depth-first preorder, roots and children in index order.
    pub fn preorder(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<u32> = self.roots.iter().rev().copied().collect();
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children[v as usize].iter().rev());
        }
        out
    }
}

/// Atom name of dyadic node `(n, k)`.
pub fn dyadic_atom(n: u32, k: u64) -> String {
    format!("{n}:{k}")
}

/// The dyadic tree truncated at level `depth`: nodes `(n, k)`, `0 <= k < 2^n`, with `(n+1, l)` a
/// child of `(n, l / 2)`.
pub fn dyadic_tree(depth: u32, node_limit: u64) -> Result<FiniteTree> {
    let nodes: u128 = (1u128 << (depth + 1).min(127)) - 1;
    if depth >= 63 || nodes > node_limit as u128 {
        return Err(Error::resource("dyadic tree nodes", nodes, node_limit));
    }
    let mut pairs = Vec::with_capacity(nodes as usize);
    for n in 0..=depth {
        for k in 0..(1u64 << n) {
            let parent = if n == 0 { None } else { Some(dyadic_atom(n - 1, k / 2)) };
            pairs.push((dyadic_atom(n, k), parent));
        }
    }
    FiniteTree::from_named(&pairs, false)
}

/// All segments `[b, a]` for comparable `b <= a`; singletons are the segments `[a, a]`.
pub fn tree_segments(tree: &FiniteTree) -> SetFamily {
    let mut members = Vec::new();
    for a in 0..tree.len() as u32 {
        let mut chain = Vec::new();
        for b in tree.ancestors(a) {
            chain.push(b);
            members.push(AtomSet::from_indices(chain.clone()));
        }
    }
    SetFamily::new(tree.ground(), members, Provenance::TreeSegments, true).expect("segments are valid members")
}

/// All branches (root-to-leaf chains) and their tails (branch minus a nonempty initial segment),
/// plus every singleton.
pub fn branches_and_tails(tree: &FiniteTree) -> SetFamily {
    let mut members = Vec::new();
    for leaf in tree.leaves() {
        // ancestors() runs leaf -> root, so each prefix is a tail ending at the leaf.
        let branch = tree.ancestors(leaf);
        for cut in 1..=branch.len() {
            members.push(AtomSet::from_indices(branch[..cut].to_vec()));
        }
    }
    SetFamily::new(tree.ground(), members, Provenance::BranchesTails, true).expect("branches are valid members")
}
