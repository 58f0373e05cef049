use super::{Edge, GraphError, WeightedGraph};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest complete graph [`sample_complete_weights`] will materialise.
pub const MAX_COMPLETE_EDGES: u128 = 50_000_000;

/// How the weights of a sampled `G(n, p)` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// Uniform on `(0, p]`: the law of a `K_n` weight given that it is at most `p`.
    Conditioned,
    /// Uniform on `[0, 1)`, independent of inclusion.
    Uniform,
}

/// `G(n, p)` by geometric skipping over the pairs `(w, v)`, `w < v`, in
/// lexicographic order of `v` then `w`. Runs in time linear in the output.
pub fn sample_gnp(n: usize, p: f64, seed: u64, mode: WeightMode) -> Result<WeightedGraph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::Probability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let weight = |rng: &mut ChaCha8Rng| match mode {
        WeightMode::Conditioned => p * (1.0 - rng.gen::<f64>()),
        WeightMode::Uniform => rng.gen::<f64>(),
    };
    if p == 0.0 || n < 2 {
        return Ok(WeightedGraph::from_parts(n, edges, true));
    }
    if p == 1.0 {
        for v in 1..n {
            for w in 0..v {
                let x = weight(&mut rng);
                edges.push(Edge::new(w, v, x));
            }
        }
        return Ok(WeightedGraph::from_parts(n, edges, true));
    }
    let log_q = (1.0 - p).ln();
    let mut v = 1usize;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + skip.min(i64::MAX as f64 / 4.0) as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            let x = weight(&mut rng);
            edges.push(Edge::new(w as usize, v, x));
        }
    }
    Ok(WeightedGraph::from_parts(n, edges, true))
}

/// `G(n, m)`: `m` distinct pairs chosen uniformly, weights uniform on `[0, 1)`.
pub fn sample_gnm(n: usize, m: usize, seed: u64) -> Result<WeightedGraph, GraphError> {
    let pairs = n as u128 * (n as u128).saturating_sub(1) / 2;
    if m as u128 > pairs {
        return Err(GraphError::Infeasible(format!(
            "{m} edges requested but K_{n} has {pairs}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = index::sample(&mut rng, pairs as usize, m).into_vec();
    chosen.sort_unstable();
    let edges = chosen
        .into_iter()
        .map(|k| {
            let (w, v) = unrank_pair(k as u64);
            Edge::new(w, v, rng.gen())
        })
        .collect();
    Ok(WeightedGraph::from_parts(n, edges, true))
}

/// Inverse of `k = v(v-1)/2 + w` for `w < v`.
fn unrank_pair(k: u64) -> (usize, usize) {
    let mut v = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as u64;
    while v * (v - 1) / 2 > k {
        v -= 1;
    }
    while (v + 1) * v / 2 <= k {
        v += 1;
    }
    ((k - v * (v - 1) / 2) as usize, v as usize)
}

/// `K_n` with independent uniform `[0, 1)` weights.
pub fn sample_complete_weights(n: usize, seed: u64) -> Result<WeightedGraph, GraphError> {
    let requested = n as u128 * (n as u128).saturating_sub(1) / 2;
    if requested > MAX_COMPLETE_EDGES {
        return Err(GraphError::Capacity {
            requested,
            max: MAX_COMPLETE_EDGES,
        });
    }
    sample_gnp(n, 1.0, seed, WeightMode::Uniform)
}
