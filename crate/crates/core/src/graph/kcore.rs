use super::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The κ-core of a graph together with the order in which other vertices left.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorePeelResult {
    pub kappa: usize,
    /// Sorted ascending.
    pub core_vertices: Vec<usize>,
    /// Ids of edges with both endpoints in the core, sorted ascending.
    pub core_edges: Vec<usize>,
    pub peel_order: Vec<usize>,
}

impl CorePeelResult {
    pub fn is_empty(&self) -> bool {
        self.core_vertices.is_empty()
    }
}

/// Which deficient vertex to remove next.
trait Frontier {
    fn push(&mut self, v: usize);
    fn pop(&mut self) -> Option<usize>;
}

impl Frontier for Vec<usize> {
    fn push(&mut self, v: usize) {
        Vec::push(self, v)
    }
    fn pop(&mut self) -> Option<usize> {
        Vec::pop(self)
    }
}

struct RandomFrontier {
    items: Vec<usize>,
    rng: ChaCha8Rng,
}

impl Frontier for RandomFrontier {
    fn push(&mut self, v: usize) {
        self.items.push(v)
    }
    fn pop(&mut self) -> Option<usize> {
        if self.items.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..self.items.len());
        Some(self.items.swap_remove(i))
    }
}

/// κ-core by peeling. Vertices below degree κ sit in a single worklist
/// bucket, so the whole peel is `O(n + m)`.
pub fn kcore(g: &WeightedGraph, kappa: usize) -> CorePeelResult {
    peel(g, kappa, Vec::new())
}

/// Same core, removing a uniformly random deficient vertex at every step.
pub fn kcore_random_order(g: &WeightedGraph, kappa: usize, seed: u64) -> CorePeelResult {
    peel(
        g,
        kappa,
        RandomFrontier {
            items: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        },
    )
}

fn peel<F: Frontier>(g: &WeightedGraph, kappa: usize, mut frontier: F) -> CorePeelResult {
    let n = g.n();
    let incidence = g.incidence();
    let mut degree = g.degrees();
    let mut queued = vec![false; n];
    let mut edge_alive = vec![true; g.edge_count()];
    for v in 0..n {
        if degree[v] < kappa {
            queued[v] = true;
            frontier.push(v);
        }
    }
    let mut peel_order = Vec::new();
    while let Some(v) = frontier.pop() {
        peel_order.push(v);
        for &id in &incidence[v] {
            if !edge_alive[id] {
                continue;
            }
            edge_alive[id] = false;
            let e = g.edges()[id];
            let w = e.other(v);
            if w == v {
                continue;
            }
            degree[w] -= 1;
            if degree[w] < kappa && !queued[w] {
                queued[w] = true;
                frontier.push(w);
            }
        }
    }
    let core_vertices: Vec<usize> = (0..n).filter(|&v| !queued[v]).collect();
    let core_edges = (0..g.edge_count()).filter(|&id| edge_alive[id]).collect();
    CorePeelResult {
        kappa,
        core_vertices,
        core_edges,
        peel_order,
    }
}

/// The κ-core as a graph on `0..|core|`, plus the original vertex ids.
pub fn core_subgraph(g: &WeightedGraph, kappa: usize) -> (WeightedGraph, Vec<usize>) {
    let core = kcore(g, kappa);
    let (sub, _) = g.induced(&core.core_vertices);
    (sub, core.core_vertices)
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

    #[test]
    fn complete_four_is_its_own_three_core() {
        let r = kcore(&complete(4), 3);
        assert_eq!(r.core_vertices, vec![0, 1, 2, 3]);
        assert_eq!(r.core_edges.len(), 6);
        assert!(r.peel_order.is_empty());
    }

    #[test]
    fn path_has_empty_two_core() {
        let g = WeightedGraph::from_pairs(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let r = kcore(&g, 2);
        assert!(r.is_empty());
        assert_eq!(r.peel_order.len(), 5);
    }

    #[test]
    fn loops_count_twice() {
        let g = WeightedGraph::multigraph_from_pairs(2, &[(0, 0), (0, 1), (0, 1)]).unwrap();
        let r = kcore(&g, 2);
        assert_eq!(r.core_vertices, vec![0, 1]);
        assert!(kcore(&g, 3).is_empty());
    }

    #[test]
    fn pendant_triangle_on_k4() {
        let mut pairs: Vec<_> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        pairs.extend([(3, 4), (4, 5), (5, 3)]);
        let g = WeightedGraph::from_pairs(6, &pairs).unwrap();
        assert_eq!(kcore(&g, 3).core_vertices, vec![0, 1, 2, 3]);
        assert_eq!(kcore(&g, 2).core_vertices.len(), 6);
    }

    fn check_core(g: &WeightedGraph, r: &CorePeelResult) {
        let kappa = r.kappa;
        let (sub, _) = g.induced(&r.core_vertices);
        assert!(sub.degrees().iter().all(|&d| d >= kappa));
        assert_eq!(sub.edge_count(), r.core_edges.len());
        let mut all: Vec<usize> = r.peel_order.iter().chain(&r.core_vertices).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..g.n()).collect::<Vec<_>>());
        // maximality: no peeled vertex has κ neighbours in core ∪ {v}
        let in_core: Vec<bool> = (0..g.n()).map(|v| r.core_vertices.binary_search(&v).is_ok()).collect();
        for &v in &r.peel_order {
            let d = g
                .edges()
                .iter()
                .filter(|e| (e.u == v && in_core[e.v]) || (e.v == v && in_core[e.u]))
                .count();
            assert!(d < kappa);
        }
        // idempotence
        let again = kcore(&sub, kappa);
        assert_eq!(again.core_vertices.len(), sub.n());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn order_invariance(seed in 0u64..10_000, c in 2.0f64..6.0, kappa in 2usize..5) {
            let n = 300;
            let g = sample_gnp(n, c / n as f64, seed, WeightMode::Uniform).unwrap();
            let base = kcore(&g, kappa);
            check_core(&g, &base);
            for order in 0..100 {
                let other = kcore_random_order(&g, kappa, seed * 1000 + order);
                prop_assert_eq!(&other.core_vertices, &base.core_vertices);
            }
        }
    }
}
