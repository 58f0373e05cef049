//! Dinic max-flow and the orientations built on it.
//!
//! The orientation network has a source arc of capacity `target` into every
//! vertex, unit arcs from each edge's endpoints to a node for the edge, and a
//! unit arc from each edge node to the sink. A unit of flow through
//! `s -> u -> e -> t` orients `e` into `u`.

use super::{ForestPartition, MatroidError};
use crate::dsu::DisjointSets;
use crate::graph::WeightedGraph;
use serde::Serialize;
use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u64,
}

/// Flow network with paired residual arcs; arc `a ^ 1` reverses arc `a`.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<u32>,
    next: Vec<usize>,
}

const UNREACHED: u32 = u32::MAX;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
            level: vec![UNREACHED; nodes],
            next: vec![0; nodes],
        }
    }

    /// Adds an arc and returns its id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    /// Flow currently carried by arc `id`.
    pub fn flow(&self, id: usize) -> u64 {
        self.arcs[id ^ 1].cap
    }

    fn build_levels(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = UNREACHED);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.out[v] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && self.level[arc.to] == UNREACHED {
                    self.level[arc.to] = self.level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] != UNREACHED
    }

    /// One augmenting path in the level graph, found without recursion.
    fn push_path(&mut self, s: usize, t: usize, stack: &mut Vec<usize>) -> u64 {
        stack.clear();
        let mut v = s;
        loop {
            if v == t {
                let bottleneck = stack.iter().map(|&a| self.arcs[a].cap).min().unwrap_or(0);
                for &a in stack.iter() {
                    self.arcs[a].cap -= bottleneck;
                    self.arcs[a ^ 1].cap += bottleneck;
                }
                return bottleneck;
            }
            let mut advanced = false;
            while self.next[v] < self.out[v].len() {
                let a = self.out[v][self.next[v]];
                let arc = &self.arcs[a];
                if arc.cap > 0 && self.level[arc.to] == self.level[v] + 1 {
                    stack.push(a);
                    v = arc.to;
                    advanced = true;
                    break;
                }
                self.next[v] += 1;
            }
            if !advanced {
                if v == s {
                    return 0;
                }
                // dead end: prune it and step back
                self.level[v] = UNREACHED;
                let a = stack.pop().expect("non-source node has an incoming arc on the stack");
                v = self.arcs[a ^ 1].to;
                self.next[v] += 1;
            }
        }
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        let mut stack = Vec::new();
        while self.build_levels(s, t) {
            self.next.iter_mut().for_each(|x| *x = 0);
            loop {
                let pushed = self.push_path(s, t, &mut stack);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }
}

/// Direction of every edge, given as the endpoint it points into.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orientation {
    pub head: Vec<usize>,
    pub indegree: Vec<usize>,
    /// Whether the edge was routed by the flow (as opposed to oriented afterwards).
    pub routed: Vec<bool>,
}

/// Orients every edge so that as many edges as possible land on vertices with
/// fewer than `target` incoming edges. Returns the orientation and the flow
/// value, the number of edges routed within the targets.
pub fn orient_indegree_target(g: &WeightedGraph, target: usize) -> (Orientation, usize) {
    let (n, m) = (g.n(), g.edge_count());
    let (s, t) = (n + m, n + m + 1);
    let mut net = FlowNetwork::new(n + m + 2);
    for v in 0..n {
        net.add_arc(s, v, target as u64);
    }
    let mut into_edge = Vec::with_capacity(m);
    for (id, e) in g.edges().iter().enumerate() {
        let node = n + id;
        let from_u = net.add_arc(e.u, node, 1);
        let from_v = if e.is_loop() {
            None
        } else {
            Some(net.add_arc(e.v, node, 1))
        };
        net.add_arc(node, t, 1);
        into_edge.push((from_u, from_v));
    }
    let value = net.max_flow(s, t) as usize;

    let mut head = vec![usize::MAX; m];
    let mut routed = vec![false; m];
    let mut indegree = vec![0; n];
    for (id, e) in g.edges().iter().enumerate() {
        let (from_u, from_v) = into_edge[id];
        if net.flow(from_u) > 0 {
            head[id] = e.u;
        } else if from_v.is_some_and(|a| net.flow(a) > 0) {
            head[id] = e.v;
        } else {
            continue;
        }
        routed[id] = true;
        indegree[head[id]] += 1;
    }
    for (id, e) in g.edges().iter().enumerate() {
        if !routed[id] {
            let h = if indegree[e.v] < indegree[e.u] { e.v } else { e.u };
            head[id] = h;
            indegree[h] += 1;
        }
    }
    (Orientation { head, indegree, routed }, value)
}

/// `k` forests obtained by breaking cycles of an orientation with indegree at most `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfdDecomposition {
    pub forests: ForestPartition,
    pub removed: Vec<usize>,
}

/// Orients with indegrees at most `k`, deals each vertex's incoming edges
/// into distinct classes (so every class has indegree at most one, hence at
/// most one cycle per component) and drops one edge from every cycle.
pub fn pfd_decompose(g: &WeightedGraph, k: usize) -> Result<PfdDecomposition, MatroidError> {
    let (orientation, value) = orient_indegree_target(g, k);
    if value < g.edge_count() {
        return Err(MatroidError::TooDense {
            oriented: value,
            edges: g.edge_count(),
        });
    }
    let mut dealt = vec![0usize; g.n()];
    let mut sets: Vec<DisjointSets> = (0..k).map(|_| DisjointSets::new(g.n())).collect();
    let mut labels = vec![None; g.edge_count()];
    let mut removed = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        let h = orientation.head[id];
        let class = dealt[h];
        dealt[h] += 1;
        if sets[class].union(e.u, e.v) {
            labels[id] = Some(class);
        } else {
            removed.push(id);
        }
    }
    Ok(PfdDecomposition {
        forests: ForestPartition::from_labels(g, k, &labels),
        removed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_gnp, WeightMode};
    use proptest::prelude::*;

    fn complete(n: usize) -> WeightedGraph {
        let pairs: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        WeightedGraph::from_pairs(n, &pairs).unwrap()
    }

    /// Min cut of the orientation network: for a source-side vertex set S,
    /// the cut is target * |V \ S| + |edges touching S|.
    fn min_cut_oracle(g: &WeightedGraph, target: usize) -> usize {
        (0u32..1 << g.n())
            .map(|mask| {
                let outside = g.n() - mask.count_ones() as usize;
                let touching = g
                    .edges()
                    .iter()
                    .filter(|e| mask >> e.u & 1 == 1 || mask >> e.v & 1 == 1)
                    .count();
                target * outside + touching
            })
            .min()
            .unwrap()
    }

    #[test]
    fn single_edge() {
        let g = WeightedGraph::from_pairs(2, &[(0, 1)]).unwrap();
        assert_eq!(orient_indegree_target(&g, 2).1, 1);
    }

    #[test]
    fn complete_four() {
        let g = complete(4);
        let (o, value) = orient_indegree_target(&g, 2);
        assert_eq!(value, 6);
        assert_eq!(min_cut_oracle(&g, 2), 6);
        assert!(o.indegree.iter().all(|&d| d <= 2));
        assert_eq!(o.indegree.iter().sum::<usize>(), 6);
    }

    #[test]
    fn dinic_textbook_network() {
        let mut net = FlowNetwork::new(6);
        for &(a, b, c) in &[
            (0, 1, 16),
            (0, 2, 13),
            (1, 2, 10),
            (2, 1, 4),
            (1, 3, 12),
            (3, 2, 9),
            (2, 4, 14),
            (4, 3, 7),
            (3, 5, 20),
            (4, 5, 4),
        ] {
            net.add_arc(a, b, c);
        }
        assert_eq!(net.max_flow(0, 5), 23);
    }

    #[test]
    fn long_residual_paths_do_not_recurse() {
        // A long path of unit capacities exercises the explicit stack.
        let n = 200_000;
        let mut net = FlowNetwork::new(n);
        for v in 0..n - 1 {
            net.add_arc(v, v + 1, 1);
        }
        assert_eq!(net.max_flow(0, n - 1), 1);
    }

    #[test]
    fn pfd_tree_and_cycle() {
        let tree = WeightedGraph::from_pairs(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let d = pfd_decompose(&tree, 1).unwrap();
        assert!(d.removed.is_empty());
        let cycle = WeightedGraph::from_pairs(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let d = pfd_decompose(&cycle, 1).unwrap();
        assert_eq!(d.removed.len(), 1);
        d.forests.validate(&cycle).unwrap();
        assert!(matches!(
            pfd_decompose(&complete(5), 1),
            Err(MatroidError::TooDense { .. })
        ));
    }

    #[test]
    fn pfd_sparse_graph_loses_few_edges() {
        let n = 10_000;
        let g = sample_gnp(n, 3.4 / n as f64, 1, WeightMode::Uniform).unwrap();
        let d = pfd_decompose(&g, 2).unwrap();
        d.forests.validate(&g).unwrap();
        assert_eq!(d.forests.len() + d.removed.len(), g.edge_count());
        assert!((d.removed.len() as f64) <= 0.01 * g.edge_count() as f64);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn flow_equals_min_cut(seed in 0u64..1_000_000, n in 2usize..9, p in 0.1f64..0.9, target in 1usize..4) {
            let g = sample_gnp(n, p, seed, WeightMode::Uniform).unwrap();
            let (o, value) = orient_indegree_target(&g, target);
            prop_assert_eq!(value, min_cut_oracle(&g, target));
            prop_assert!(value <= target * n);
            let mut recount = vec![0; n];
            for (id, &h) in o.head.iter().enumerate() {
                let e = g.edges()[id];
                prop_assert!(h == e.u || h == e.v);
                recount[h] += 1;
            }
            prop_assert_eq!(&recount, &o.indegree);
            let routed_in: usize = o.routed.iter().filter(|&&r| r).count();
            prop_assert_eq!(routed_in, value);
        }

        #[test]
        fn pfd_partition_is_complete(seed in 0u64..1_000_000, k in 1usize..4) {
            let n = 30;
            let g = sample_gnp(n, 3.0 / n as f64, seed, WeightMode::Uniform).unwrap();
            if let Ok(d) = pfd_decompose(&g, k) {
                d.forests.validate(&g).unwrap();
                prop_assert_eq!(d.forests.len() + d.removed.len(), g.edge_count());
            }
        }
    }
}
