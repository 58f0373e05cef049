use super::MatroidError;
use crate::dsu::DisjointSets;
use crate::graph::WeightedGraph;

pub const BRUTE_FORCE_MAX_EDGES: usize = 20;

/// Rank of the `k`-fold union by exhaustive search over all edge subsets,
/// using the matroid union formula `min_A |E \ A| + k r(A)`, where `r` is the
/// forest rank. Shares no code with the augmenting search.
pub fn brute_rank_k(g: &WeightedGraph, k: usize) -> Result<usize, MatroidError> {
    let m = g.edge_count();
    if m > BRUTE_FORCE_MAX_EDGES {
        return Err(MatroidError::TooLarge {
            edges: m,
            max: BRUTE_FORCE_MAX_EDGES,
        });
    }
    let best = (0u32..1 << m)
        .map(|mask| {
            let mut d = DisjointSets::new(g.n());
            let mut inside = 0;
            let mut forest_rank = 0;
            for (id, e) in g.edges().iter().enumerate() {
                if mask >> id & 1 == 1 {
                    inside += 1;
                    forest_rank += d.union(e.u, e.v) as usize;
                }
            }
            (m - inside) + k * forest_rank
        })
        .min()
        .unwrap_or(0);
    Ok(best)
}
