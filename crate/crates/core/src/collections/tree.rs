use std::fmt;

use serde::{Deserialize, Serialize};

/// A planar rooted tree whose internal vertices carry generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlanarTree {
    Leaf,
    Node(usize, Vec<PlanarTree>),
}

impl PlanarTree {
    pub fn leaves(&self) -> usize {
        match self {
            PlanarTree::Leaf => 1,
            PlanarTree::Node(_, ch) => ch.iter().map(PlanarTree::leaves).sum(),
        }
    }

    /// Replaces the leaves, in planar order, by `subs`.
    pub fn graft(&self, subs: &[PlanarTree]) -> PlanarTree {
        debug_assert_eq!(subs.len(), self.leaves());
        let mut it = subs.iter();
        self.graft_from(&mut it)
    }

    fn graft_from<'a>(&self, it: &mut impl Iterator<Item = &'a PlanarTree>) -> PlanarTree {
        match self {
            PlanarTree::Leaf => it.next().expect("enough subtrees").clone(),
            PlanarTree::Node(g, ch) => {
                PlanarTree::Node(*g, ch.iter().map(|c| c.graft_from(it)).collect())
            }
        }
    }

    /// All trees with `n` leaves over generators of the given arities, sorted.
    pub fn enumerate(arities: &[usize], n: usize) -> Vec<PlanarTree> {
        let mut memo: Vec<Vec<PlanarTree>> = Vec::with_capacity(n + 1);
        for leaves in 0..=n {
            let mut trees = Vec::new();
            if leaves == 1 {
                trees.push(PlanarTree::Leaf);
            }
            for (g, &a) in arities.iter().enumerate() {
                for split in compositions(leaves, a) {
                    let mut partial: Vec<Vec<PlanarTree>> = vec![vec![]];
                    for &part in &split {
                        let mut next = Vec::new();
                        for prefix in &partial {
                            for t in &memo[part] {
                                let mut p = prefix.clone();
                                p.push(t.clone());
                                next.push(p);
                            }
                        }
                        partial = next;
                    }
                    trees.extend(partial.into_iter().map(|ch| PlanarTree::Node(g, ch)));
                }
            }
            trees.sort();
            memo.push(trees);
        }
        memo.swap_remove(n)
    }
}

/// Ordered ways to write `total` as `parts` positive summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarTree::Leaf => write!(f, "|"),
            PlanarTree::Node(g, ch) => {
                write!(f, "g{g}(")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_trees_are_catalan() {
        let counts: Vec<usize> = (1..=5).map(|n| PlanarTree::enumerate(&[2], n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14]);
    }

    #[test]
    fn graft_counts_leaves() {
        let t = &PlanarTree::enumerate(&[2], 3)[0];
        let s = &PlanarTree::enumerate(&[2], 2)[0];
        let g = t.graft(&[s.clone(), PlanarTree::Leaf, s.clone()]);
        assert_eq!(g.leaves(), 5);
    }
}
