//! Union of `k` graphic matroids: edge sets that split into `k` forests.
//!
//! Edges are inserted one at a time. An insertion searches breadth-first over
//! the exchange relation "edge y may enter forest j if edge z leaves it", where
//! z runs over the cycle y would close in forest j, and stops at the first
//! edge that fits into some forest outright. Shifting edges along that
//! shortest chain keeps every forest acyclic.
//!
//! A failed search proves that its labelled edges span a vertex set on which
//! every forest is already a spanning tree. Such sets are merged in a
//! union-find over vertices, and later edges inside one are rejected at once.

mod brute;
mod flow;
mod witness;

pub use brute::{brute_rank_k, BRUTE_FORCE_MAX_EDGES};
pub use flow::{orient_indegree_target, pfd_decompose, FlowNetwork, Orientation, PfdDecomposition};
pub use witness::{validate_witness, Witness, WitnessEdge, WITNESS_SCHEMA};

use crate::dsu::DisjointSets;
use crate::graph::{kcore, WeightedGraph};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatroidError {
    #[error("graph has rank {rank} but {needed} edges are needed for k spanning trees")]
    Infeasible { rank: usize, needed: usize },
    #[error("orientation covers {oriented} of {edges} edges; some subgraph is denser than k")]
    TooDense { oriented: usize, edges: usize },
    #[error("{edges} edges exceed the brute-force limit of {max}")]
    TooLarge { edges: usize, max: usize },
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
}

/// Assignment of some edges of a graph to `k` edge-disjoint forests.
#[derive(Clone, Debug, PartialEq)]
pub struct ForestPartition {
    k: usize,
    n: usize,
    class_of: Vec<Option<usize>>,
    /// `adjacency[class][vertex]` lists `(neighbour, edge id)`.
    adjacency: Vec<Vec<Vec<(usize, usize)>>>,
    assigned: usize,
}

impl ForestPartition {
    pub fn empty(g: &WeightedGraph, k: usize) -> Self {
        ForestPartition {
            k,
            n: g.n(),
            class_of: vec![None; g.edge_count()],
            adjacency: vec![vec![Vec::new(); g.n()]; k],
            assigned: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class_of(&self, edge: usize) -> Option<usize> {
        self.class_of[edge]
    }

    /// Number of assigned edges.
    pub fn len(&self) -> usize {
        self.assigned
    }

    pub fn is_empty(&self) -> bool {
        self.assigned == 0
    }

    /// Edge ids of each class, ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (id, c) in self.class_of.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push(id);
            }
        }
        out
    }

    pub fn assigned_edges(&self) -> Vec<usize> {
        (0..self.class_of.len())
            .filter(|&id| self.class_of[id].is_some())
            .collect()
    }

    fn attach(&mut self, g: &WeightedGraph, edge: usize, class: usize) {
        let e = g.edges()[edge];
        self.adjacency[class][e.u].push((e.v, edge));
        self.adjacency[class][e.v].push((e.u, edge));
        self.class_of[edge] = Some(class);
    }

    fn detach(&mut self, g: &WeightedGraph, edge: usize) {
        let Some(class) = self.class_of[edge].take() else {
            return;
        };
        let e = g.edges()[edge];
        for x in [e.u, e.v] {
            let list = &mut self.adjacency[class][x];
            if let Some(pos) = list.iter().position(|&(_, id)| id == edge) {
                list.swap_remove(pos);
            }
        }
    }

    /// Builds a partition from explicit class labels.
    pub(crate) fn from_labels(g: &WeightedGraph, k: usize, labels: &[Option<usize>]) -> Self {
        let mut p = ForestPartition::empty(g, k);
        for (id, label) in labels.iter().enumerate() {
            if let Some(c) = *label {
                p.attach(g, id, c);
                p.assigned += 1;
            }
        }
        p
    }

    /// Checks that classes are acyclic and consistent with `g`.
    pub fn validate(&self, g: &WeightedGraph) -> Result<(), MatroidError> {
        validate_witness(g, &Witness::from_partition(g, self))
    }
}

/// Incremental independence oracle for the `k`-fold union.
pub struct UnionSolver<'g> {
    g: &'g WeightedGraph,
    partition: ForestPartition,
    saturated: DisjointSets,
    // scratch marks reused across searches; a mark is valid when it equals the counter
    stamp: u64,
    vertex_stamp: Vec<u64>,
    vertex_parent: Vec<(usize, usize)>,
    edge_stamp: Vec<u64>,
    edge_label: Vec<(usize, usize)>,
}

impl<'g> UnionSolver<'g> {
    pub fn new(g: &'g WeightedGraph, k: usize) -> Self {
        UnionSolver {
            g,
            partition: ForestPartition::empty(g, k),
            saturated: DisjointSets::new(g.n()),
            stamp: 0,
            vertex_stamp: vec![0; g.n()],
            vertex_parent: vec![(0, 0); g.n()],
            edge_stamp: vec![0; g.edge_count()],
            edge_label: vec![(0, 0); g.edge_count()],
        }
    }

    pub fn partition(&self) -> &ForestPartition {
        &self.partition
    }

    pub fn into_partition(self) -> ForestPartition {
        self.partition
    }

    fn next_stamp(&mut self) -> u64 {
        self.stamp += 1;
        self.stamp
    }

    /// Edge ids on the path from `a` to `b` in forest `class`, or `None`.
    fn forest_path(&mut self, class: usize, a: usize, b: usize) -> Option<Vec<usize>> {
        let stamp = self.next_stamp();
        let adjacency = &self.partition.adjacency[class];
        let mut queue = VecDeque::from([a]);
        self.vertex_stamp[a] = stamp;
        while let Some(x) = queue.pop_front() {
            if x == b {
                let mut path = Vec::new();
                let mut cur = b;
                while cur != a {
                    let (prev, edge) = self.vertex_parent[cur];
                    path.push(edge);
                    cur = prev;
                }
                return Some(path);
            }
            for &(y, edge) in &adjacency[x] {
                if self.vertex_stamp[y] != stamp {
                    self.vertex_stamp[y] = stamp;
                    self.vertex_parent[y] = (x, edge);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Tries to add `edge`; returns whether the enlarged set is still independent.
    pub fn insert(&mut self, edge: usize) -> bool {
        if self.partition.class_of[edge].is_some() {
            return false;
        }
        let e = self.g.edges()[edge];
        if e.is_loop() || self.partition.k == 0 || self.saturated.same(e.u, e.v) {
            return false;
        }
        let search = self.next_stamp();
        self.edge_stamp[edge] = search;
        let mut labelled = vec![edge];
        let mut queue = VecDeque::from([edge]);
        while let Some(y) = queue.pop_front() {
            let ye = self.g.edges()[y];
            for class in 0..self.partition.k {
                if self.partition.class_of[y] == Some(class) {
                    continue;
                }
                match self.forest_path(class, ye.u, ye.v) {
                    None => {
                        self.augment(edge, y, class);
                        return true;
                    }
                    Some(cycle) => {
                        for z in cycle {
                            if self.edge_stamp[z] != search {
                                self.edge_stamp[z] = search;
                                self.edge_label[z] = (y, class);
                                labelled.push(z);
                                queue.push_back(z);
                            }
                        }
                    }
                }
            }
        }
        for z in labelled {
            let ze = self.g.edges()[z];
            self.saturated.union(ze.u, ze.v);
        }
        false
    }

    /// Moves `last` into `class`, then walks the labels back to `root`.
    fn augment(&mut self, root: usize, last: usize, class: usize) {
        let (mut cur, mut target) = (last, class);
        loop {
            let vacated = self.partition.class_of[cur];
            self.partition.detach(self.g, cur);
            self.partition.attach(self.g, cur, target);
            if cur == root {
                break;
            }
            let (pred, via) = self.edge_label[cur];
            debug_assert_eq!(vacated, Some(via));
            cur = pred;
            target = via;
        }
        self.partition.assigned += 1;
    }
}

/// Whether `subset` splits into `k` forests; on success also a witness.
/// Repeated ids are treated as one.
pub fn is_independent(g: &WeightedGraph, subset: &[usize], k: usize) -> (bool, Option<ForestPartition>) {
    let mut ids = subset.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut solver = UnionSolver::new(g, k);
    for id in ids {
        if !solver.insert(id) {
            return (false, None);
        }
    }
    (true, Some(solver.into_partition()))
}

/// Size of a largest edge set splitting into `k` forests.
pub fn rank_k(g: &WeightedGraph, k: usize) -> usize {
    rank_with_partition(g, k).len()
}

/// A maximum independent set of the union together with its partition.
pub fn rank_with_partition(g: &WeightedGraph, k: usize) -> ForestPartition {
    let cap = k * g.n().saturating_sub(1);
    let mut solver = UnionSolver::new(g, k);
    for id in 0..g.edge_count() {
        if solver.partition.len() == cap {
            break;
        }
        solver.insert(id);
    }
    solver.into_partition()
}

/// Minimum total weight of `k` edge-disjoint spanning trees.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningForests {
    pub total_weight: f64,
    pub partition: ForestPartition,
}

/// Matroid greedy: edges by ascending `(weight, id)`, kept when independent.
pub fn min_weight_k_spanning_trees(g: &WeightedGraph, k: usize) -> Result<SpanningForests, MatroidError> {
    let needed = k * g.n().saturating_sub(1);
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&a, &b| g.edges()[a].weight.total_cmp(&g.edges()[b].weight).then(a.cmp(&b)));
    let mut solver = UnionSolver::new(g, k);
    let mut total_weight = 0.0;
    for id in order {
        if solver.partition.len() == needed {
            break;
        }
        if solver.insert(id) {
            total_weight += g.edges()[id].weight;
        }
    }
    let rank = solver.partition.len();
    if rank < needed {
        return Err(MatroidError::Infeasible { rank, needed });
    }
    Ok(SpanningForests {
        total_weight,
        partition: solver.into_partition(),
    })
}

/// Rank as edges outside the `(k+1)`-core plus the rank of the core.
pub fn rank_via_core_identity(g: &WeightedGraph, k: usize) -> usize {
    let core = kcore(g, k + 1);
    let outside = g.edge_count() - core.core_edges.len();
    outside + rank_k(&g.with_edges(&core.core_edges), k)
}
