//! Drawing realizations of `H(n; mu, K)`.
//!
//! One trial consumes a single [`TrialRng`]: first the `n` class labels, then
//! the selection sets for nodes `0..n` in order. Selection sets and the
//! undirected adjacency are stored CSR style (offsets plus a flat target
//! array), each row sorted ascending.

use std::collections::HashSet;

use crate::model::ModelParams;
use crate::rng::{SeedSpec, TrialRng};

/// Node index within one graph.
pub type NodeId = u32;

/// Below this ratio `K / (n - 1)` subsets are drawn by rejection, at or
/// above it by a partial Fisher-Yates shuffle.
pub const SHUFFLE_CROSSOVER: f64 = 0.125;

/// Rejection sampling keeps its seen-set in a vector up to this many
/// elements and switches to a hash set beyond.
const LINEAR_SCAN_LIMIT: usize = 32;

/// Class labels, one per node.
pub fn sample_classes(params: &ModelParams, seed: SeedSpec) -> Vec<u32> {
    sample_classes_from(params, &mut seed.stream())
}

fn sample_classes_from(params: &ModelParams, rng: &mut TrialRng) -> Vec<u32> {
    let n = params.n() as usize;
    let r = params.num_classes();
    if r == 1 {
        return vec![0; n];
    }
    let mut cumulative = Vec::with_capacity(r);
    let mut acc = 0.0;
    for &m in params.mu() {
        acc += m;
        cumulative.push(acc);
    }
    (0..n)
        .map(|_| {
            let u = rng.unit_f64();
            // The last class absorbs any rounding slack in the cumulative sum.
            cumulative[..r - 1]
                .iter()
                .position(|&c| u < c)
                .unwrap_or(r - 1) as u32
        })
        .collect()
}

/// Selection sets in CSR layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selections {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Selections {
    /// Builds from explicit per-node sets. Each set is sorted; no other
    /// checking happens here (see [`KOutGraph::from_selections`]).
    pub fn from_sets<I, S>(sets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = NodeId>,
    {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for set in sets {
            let start = targets.len();
            targets.extend(set);
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `Gamma_v`, sorted ascending.
    pub fn of(&self, v: usize) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn total(&self) -> usize {
        self.targets.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[NodeId]> + '_ {
        self.offsets.windows(2).map(|w| &self.targets[w[0]..w[1]])
    }
}

/// Uniform `K_{t_v}`-subsets of `V \ {v}` for every node.
pub fn sample_selections(params: &ModelParams, classes: &[u32], seed: SeedSpec) -> Selections {
    // Advance past the class draws so that this matches `build_graph`.
    let mut rng = seed.stream();
    let _ = sample_classes_from(params, &mut rng);
    sample_selections_from(params, classes, &mut rng)
}

fn sample_selections_from(params: &ModelParams, classes: &[u32], rng: &mut TrialRng) -> Selections {
    let n = params.n() as usize;
    assert_eq!(classes.len(), n, "one class label per node");
    let ks = params.k();
    let total: usize = classes.iter().map(|&c| ks[c as usize] as usize).sum();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::with_capacity(total);
    offsets.push(0);
    let mut scratch = Vec::new();
    for (v, &c) in classes.iter().enumerate() {
        let k = ks[c as usize] as usize;
        let start = targets.len();
        draw_subset(rng, n, v, k, &mut targets, &mut scratch);
        targets[start..].sort_unstable();
        offsets.push(targets.len());
    }
    Selections { offsets, targets }
}

/// Appends a uniform `k`-subset of `{0..n} \ {v}` to `out`.
fn draw_subset(
    rng: &mut TrialRng,
    n: usize,
    v: usize,
    k: usize,
    out: &mut Vec<NodeId>,
    scratch: &mut Vec<NodeId>,
) {
    let pool = n - 1;
    debug_assert!(k <= pool);
    // Candidates are `0..pool`, shifted past `v`.
    let lift = |x: u64| -> NodeId {
        let x = x as usize;
        (if x >= v { x + 1 } else { x }) as NodeId
    };
    if (k as f64) >= SHUFFLE_CROSSOVER * pool as f64 {
        scratch.clear();
        scratch.extend((0..pool as NodeId).map(|x| lift(x as u64)));
        for i in 0..k {
            let j = i + rng.below((pool - i) as u64) as usize;
            scratch.swap(i, j);
        }
        out.extend_from_slice(&scratch[..k]);
    } else if k <= LINEAR_SCAN_LIMIT {
        let start = out.len();
        while out.len() - start < k {
            let u = lift(rng.below(pool as u64));
            if !out[start..].contains(&u) {
                out.push(u);
            }
        }
    } else {
        let mut seen = HashSet::with_capacity(k);
        while seen.len() < k {
            let u = lift(rng.below(pool as u64));
            if seen.insert(u) {
                out.push(u);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("expected {expected} class labels, got {got}")]
    ClassCount { expected: usize, got: usize },
    #[error("node {node} has class {class}, but there are only {num_classes} classes")]
    ClassOutOfRange { node: usize, class: u32, num_classes: usize },
    #[error("node {node} selects {got} nodes but its class requires {expected}")]
    SelectionSize { node: usize, expected: u64, got: usize },
    #[error("node {node} selects invalid node {target}")]
    BadTarget { node: usize, target: NodeId },
}

/// One sampled realization of the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KOutGraph {
    n: usize,
    classes: Vec<u32>,
    selections: Selections,
    adj_offsets: Vec<usize>,
    adj_targets: Vec<NodeId>,
}

impl KOutGraph {
    /// Assembles a graph from explicit class labels and selections, checking
    /// them against `params`. Used by the dump reader and by tests that need
    /// a specific configuration.
    pub fn from_selections(
        params: &ModelParams,
        classes: Vec<u32>,
        selections: Selections,
    ) -> Result<Self, GraphError> {
        let n = params.n() as usize;
        if classes.len() != n || selections.num_nodes() != n {
            return Err(GraphError::ClassCount {
                expected: n,
                got: classes.len().min(selections.num_nodes()),
            });
        }
        for (v, (&c, set)) in classes.iter().zip(selections.iter()).enumerate() {
            let Some(&k) = params.k().get(c as usize) else {
                return Err(GraphError::ClassOutOfRange {
                    node: v,
                    class: c,
                    num_classes: params.num_classes(),
                });
            };
            if set.len() as u64 != k {
                return Err(GraphError::SelectionSize {
                    node: v,
                    expected: k,
                    got: set.len(),
                });
            }
            for (i, &u) in set.iter().enumerate() {
                if u as usize >= n || u as usize == v || (i > 0 && set[i - 1] == u) {
                    return Err(GraphError::BadTarget { node: v, target: u });
                }
            }
        }
        Ok(Self::assemble(classes, selections))
    }

    fn assemble(classes: Vec<u32>, selections: Selections) -> Self {
        let n = classes.len();
        let mut degree = vec![0usize; n];
        for (v, set) in selections.iter().enumerate() {
            degree[v] += set.len();
            for &u in set {
                degree[u as usize] += 1;
            }
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        for d in &degree {
            adj_offsets.push(adj_offsets.last().unwrap() + d);
        }
        let mut fill = adj_offsets[..n].to_vec();
        let mut raw = vec![0 as NodeId; adj_offsets[n]];
        for (v, set) in selections.iter().enumerate() {
            for &u in set {
                raw[fill[v]] = u;
                fill[v] += 1;
                raw[fill[u as usize]] = v as NodeId;
                fill[u as usize] += 1;
            }
        }
        // Sort each row and drop duplicates from mutual selections.
        let mut adj_targets = Vec::with_capacity(raw.len());
        let mut compact_offsets = Vec::with_capacity(n + 1);
        compact_offsets.push(0);
        for v in 0..n {
            let row = &mut raw[adj_offsets[v]..adj_offsets[v + 1]];
            row.sort_unstable();
            let start = adj_targets.len();
            for &u in row.iter() {
                if adj_targets.len() == start || *adj_targets.last().unwrap() != u {
                    adj_targets.push(u);
                }
            }
            compact_offsets.push(adj_targets.len());
        }
        Self {
            n,
            classes,
            selections,
            adj_offsets: compact_offsets,
            adj_targets,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// 0-based class label of every node.
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn selections(&self) -> &Selections {
        &self.selections
    }

    /// Sorted, deduplicated neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[NodeId] {
        &self.adj_targets[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj_offsets[v + 1] - self.adj_offsets[v]
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.adj_targets.len() / 2
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as NodeId)).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u as NodeId, v))
        })
    }
}

/// Samples classes and selections for one trial and materializes the graph.
pub fn build_graph(params: &ModelParams, seed: SeedSpec) -> KOutGraph {
    let mut rng = seed.stream();
    let classes = sample_classes_from(params, &mut rng);
    let selections = sample_selections_from(params, &classes, &mut rng);
    KOutGraph::assemble(classes, selections)
}
