//! Connected components of a sampled graph and the isolated-pair count `Y`.
//!
//! `Y` counts unordered pairs `{i, j}` where both nodes are class 1, each
//! selected only the other, and no third node selected either of them. Such a
//! pair is a component of size two. [`count_isolated_pairs`] evaluates that
//! definition directly from selections and in-degrees; [`census`] reaches the
//! same number by filtering the component partition, and the two are checked
//! against each other in tests.
//!
//! For `n <= 4` a pair may be the whole graph or half of it. It is counted
//! all the same, so at `n = 2` with one class the single component yields
//! `Y = 1` while the graph is connected.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::sampler::KOutGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentCensus {
    pub connected: bool,
    /// Component sizes, largest first.
    pub component_sizes: Vec<usize>,
    pub num_components: usize,
    pub y_count: usize,
}

impl ComponentCensus {
    /// Component size histogram, `size -> number of components`.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &s in &self.component_sizes {
            *h.entry(s).or_insert(0) += 1;
        }
        h
    }
}

/// Exact connected components via union-find over the adjacency lists.
pub fn census(graph: &KOutGraph) -> ComponentCensus {
    let n = graph.num_nodes();
    let mut dsu = DisjointSets::new(n);
    for v in 0..n {
        for &u in graph.neighbors(v) {
            if (u as usize) > v {
                dsu.union(v, u as usize);
            }
        }
    }

    let mut size_of_root = vec![0usize; n];
    let mut pair_members: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = dsu.find(v);
        size_of_root[r] += 1;
        if dsu.set_size(r) == 2 {
            if slot[r] == usize::MAX {
                slot[r] = pair_members.len();
                pair_members.push(Vec::with_capacity(2));
            }
            pair_members[slot[r]].push(v);
        }
    }

    let mut component_sizes: Vec<usize> = size_of_root.into_iter().filter(|&s| s > 0).collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));

    let classes = graph.classes();
    let sel = graph.selections();
    let y_count = pair_members
        .iter()
        .filter(|m| {
            m.iter()
                .all(|&v| classes[v] == 0 && sel.of(v).len() == 1)
        })
        .count();

    let num_components = component_sizes.len();
    ComponentCensus {
        connected: num_components == 1,
        component_sizes,
        num_components,
        y_count,
    }
}

/// Counts the pairs satisfying the isolated-pair event directly.
pub fn count_isolated_pairs(graph: &KOutGraph) -> usize {
    let n = graph.num_nodes();
    let sel = graph.selections();
    let classes = graph.classes();
    let mut selected_by = vec![0u32; n];
    for set in sel.iter() {
        for &u in set {
            selected_by[u as usize] += 1;
        }
    }
    (0..n)
        .filter(|&i| {
            let si = sel.of(i);
            if classes[i] != 0 || si.len() != 1 {
                return false;
            }
            let j = si[0] as usize;
            j > i
                && classes[j] == 0
                && sel.of(j) == [i as u32]
                && selected_by[i] == 1
                && selected_by[j] == 1
        })
        .count()
}
