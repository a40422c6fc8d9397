use std::collections::{BTreeMap, BTreeSet};

/// Union-find over dense label ids with undo.
///
/// No path compression, so every union can be rolled back in O(1). Each
/// component remembers whether it consists of summed labels only; those
/// components are closed index loops and each evaluates to a factor `N`.
#[derive(Clone, Debug)]
pub struct RollbackUnionFind {
    parent: Vec<u16>,
    size: Vec<u16>,
    pure: Vec<bool>,
    pure_components: u32,
    history: Vec<Undo>,
}

#[derive(Clone, Copy, Debug)]
struct Undo {
    child: u16,
    root: u16,
    root_pure: bool,
    pure_delta: bool,
}

impl RollbackUnionFind {
    /// `summed[i]` marks label `i` as an internal (summed) index.
    pub fn new(summed: &[bool]) -> Self {
        assert!(summed.len() < u16::MAX as usize, "too many labels");
        Self {
            parent: (0..summed.len() as u16).collect(),
            size: vec![1; summed.len()],
            pure: summed.to_vec(),
            pure_components: summed.iter().filter(|&&s| s).count() as u32,
            history: Vec::with_capacity(2 * summed.len()),
        }
    }

    #[inline]
    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    #[inline]
    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] > self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        let pure_delta = self.pure[ra] || self.pure[rb];
        self.history.push(Undo {
            child: ra as u16,
            root: rb as u16,
            root_pure: self.pure[rb],
            pure_delta,
        });
        self.parent[ra] = rb as u16;
        self.size[rb] += self.size[ra];
        self.pure[rb] = self.pure[ra] && self.pure[rb];
        if pure_delta {
            self.pure_components -= 1;
        }
    }

    #[inline]
    pub fn checkpoint(&self) -> usize {
        self.history.len()
    }

    #[inline]
    pub fn rollback(&mut self, checkpoint: usize) {
        while self.history.len() > checkpoint {
            let u = self.history.pop().unwrap();
            let (child, root) = (u.child as usize, u.root as usize);
            self.parent[child] = child as u16;
            self.size[root] -= self.size[child];
            self.pure[root] = u.root_pure;
            if u.pure_delta {
                self.pure_components += 1;
            }
        }
    }

    /// Components made only of summed labels.
    #[inline]
    pub fn closed_loops(&self) -> u32 {
        self.pure_components
    }
}

/// A product of Kronecker deltas, each an edge between two labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaGraph<L> {
    pub edges: Vec<(L, L)>,
}

impl<L> DeltaGraph<L> {
    pub fn new(edges: Vec<(L, L)>) -> Self {
        Self { edges }
    }
}

/// Outcome of summing a delta product over its internal labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopCount<L> {
    /// Groups of free labels forced equal, each sorted, sorted overall;
    /// unconstrained free labels are omitted.
    pub blocks: Vec<Vec<L>>,
    /// Exponent of `N` from closed loops.
    pub power: u32,
}

/// Contracts every delta that touches a summed label.
///
/// Closed cycles of summed labels each give a factor `N`; chains ending on
/// free labels relabel them into equality blocks; a summed label reaching
/// exactly one free label disappears without a factor.
pub fn count_loops<L: Ord + Clone>(pattern: &DeltaGraph<L>, summed: &BTreeSet<L>) -> LoopCount<L> {
    let mut ids: BTreeMap<L, usize> = BTreeMap::new();
    for l in summed.iter().chain(pattern.edges.iter().flat_map(|(a, b)| [a, b])) {
        let next = ids.len();
        ids.entry(l.clone()).or_insert(next);
    }
    let mut is_summed = vec![false; ids.len()];
    for (l, &i) in &ids {
        is_summed[i] = summed.contains(l);
    }
    let mut uf = RollbackUnionFind::new(&is_summed);
    for (a, b) in &pattern.edges {
        uf.union(ids[a], ids[b]);
    }
    let mut groups: BTreeMap<usize, Vec<L>> = BTreeMap::new();
    for (l, &i) in &ids {
        if !is_summed[i] {
            groups.entry(uf.find(i)).or_default().push(l.clone());
        }
    }
    let mut blocks: Vec<Vec<L>> = groups.into_values().filter(|g| g.len() > 1).collect();
    blocks.sort();
    LoopCount { blocks, power: uf.closed_loops() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summed(labels: &[&'static str]) -> BTreeSet<&'static str> {
        labels.iter().copied().collect()
    }

    #[test]
    fn two_cycle_and_three_cycle() {
        let two = DeltaGraph::new(vec![("a", "b"), ("b", "a")]);
        assert_eq!(count_loops(&two, &summed(&["a", "b"])), LoopCount { blocks: vec![], power: 1 });
        let three = DeltaGraph::new(vec![("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(count_loops(&three, &summed(&["a", "b", "c"])).power, 1);
    }

    #[test]
    fn open_chain_carries_no_factor() {
        // sum_b delta_ab delta_ba with a free
        let chain = DeltaGraph::new(vec![("a", "b"), ("b", "a")]);
        assert_eq!(count_loops(&chain, &summed(&["b"])), LoopCount { blocks: vec![], power: 0 });
        // sum_b delta_ab delta_bc relabels to delta_ac
        let relabel = DeltaGraph::new(vec![("a", "b"), ("b", "c")]);
        assert_eq!(
            count_loops(&relabel, &summed(&["b"])),
            LoopCount { blocks: vec![vec!["a", "c"]], power: 0 }
        );
    }

    #[test]
    fn untouched_summed_label_is_a_loop() {
        let g: DeltaGraph<&str> = DeltaGraph::new(vec![]);
        assert_eq!(count_loops(&g, &summed(&["x", "y"])).power, 2);
    }

    #[test]
    fn rollback_restores_state() {
        let mut uf = RollbackUnionFind::new(&[true, true, false, true]);
        assert_eq!(uf.closed_loops(), 3);
        let cp = uf.checkpoint();
        uf.union(0, 1);
        assert_eq!(uf.closed_loops(), 2);
        uf.union(1, 2);
        assert_eq!(uf.closed_loops(), 1);
        uf.union(0, 2);
        uf.rollback(cp);
        assert_eq!(uf.closed_loops(), 3);
        assert_ne!(uf.find(0), uf.find(1));
    }
}
