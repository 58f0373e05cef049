//! Degree sequences with Poisson(λ) degrees conditioned to be at least 3, and
//! the configuration model on them.
//!
//! The degree sum must hit `2M` exactly. Draws are first rejected wholesale
//! until the sum matches (within a bounded number of draws). If that budget
//! runs out, single vertices are redrawn and a redraw is kept only when it
//! moves the sum closer to `2M`. That second phase is not an exact sample
//! from the conditional law; it slightly favours sequences reachable by few
//! moves from a typical draw, which is immaterial at the sizes used here.

use super::{Edge, GraphError, WeightedGraph};
use crate::special_fn::{scaled_tail, tail_ratio_inverse};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

const REJECTION_TRIES: usize = 100_000;
/// Total single-vertex draws the rejection phase may spend.
const REJECTION_DRAW_BUDGET: usize = 50_000_000;
const SIMPLE_RETRIES: usize = 1_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    total: usize,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Result<Self, GraphError> {
        if let Some(pos) = degrees.iter().position(|&d| d < 3) {
            return Err(GraphError::Infeasible(format!(
                "vertex {pos} has degree {} below 3",
                degrees[pos]
            )));
        }
        let total = degrees.iter().sum::<usize>();
        if total % 2 == 1 {
            return Err(GraphError::Infeasible(format!("degree sum {total} is odd")));
        }
        Ok(DegreeSequence { degrees, total })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

/// Inversion sampler for `P(d = j) = λ^j / (j! f_3(λ))`, `j >= 3`.
struct TruncatedPoisson {
    cumulative: Vec<f64>,
}

impl TruncatedPoisson {
    fn new(lambda: f64) -> Self {
        let norm = scaled_tail(3, lambda);
        let mut cumulative = Vec::new();
        let mut pmf = (-lambda).exp() * lambda.powi(3) / 6.0 / norm;
        let mut acc = 0.0;
        let mut j = 3usize;
        while acc < 1.0 - 1e-17 && j < 3 + 10_000 {
            acc += pmf;
            cumulative.push(acc);
            j += 1;
            pmf *= lambda / j as f64;
            if pmf == 0.0 && j as f64 > lambda {
                break;
            }
        }
        TruncatedPoisson { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.cumulative.is_empty() {
            return 3;
        }
        let u = rng.gen::<f64>() * self.cumulative[self.cumulative.len() - 1];
        3 + self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// `count` degrees with mean `2M / count`, each at least 3, summing to `2M`.
pub fn sample_truncated_poisson_degrees(count: usize, edges: usize, seed: u64) -> Result<DegreeSequence, GraphError> {
    let target = 2 * edges;
    if count == 0 || target < 3 * count {
        return Err(GraphError::Infeasible(format!(
            "mean degree 2M/N = {target}/{count} is below 3"
        )));
    }
    if target == 3 * count {
        return DegreeSequence::new(vec![3; count]);
    }
    let lambda = tail_ratio_inverse(3, target as f64 / count as f64);
    let law = TruncatedPoisson::new(lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let tries = REJECTION_TRIES.min((REJECTION_DRAW_BUDGET / count).max(1));
    let mut degrees = vec![0; count];
    let mut total = 0;
    for _ in 0..tries {
        degrees.iter_mut().for_each(|d| *d = law.sample(&mut rng));
        total = degrees.iter().sum::<usize>();
        if total == target {
            return DegreeSequence::new(degrees);
        }
    }

    let steps = 10 * count + REJECTION_TRIES;
    for _ in 0..steps {
        let v = rng.gen_range(0..count);
        let fresh = law.sample(&mut rng);
        let moved = total - degrees[v] + fresh;
        if moved.abs_diff(target) < total.abs_diff(target) {
            total = moved;
            degrees[v] = fresh;
            if total == target {
                return DegreeSequence::new(degrees);
            }
        }
    }
    Err(GraphError::Sampling {
        attempts: tries + steps,
        detail: format!("degree sum stuck at {total}, target {target}"),
    })
}

/// Uniform perfect matching of the degree points; weights are all 1.
///
/// With `require_simple` the matching is redrawn until it has no loops or
/// parallel edges.
pub fn sample_core_multigraph(
    degrees: &DegreeSequence,
    seed: u64,
    require_simple: bool,
) -> Result<WeightedGraph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = degrees
        .degrees()
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    let attempts = if require_simple { SIMPLE_RETRIES } else { 1 };
    for _ in 0..attempts {
        points.shuffle(&mut rng);
        let edges: Vec<Edge> = points
            .chunks_exact(2)
            .map(|pair| Edge::new(pair[0], pair[1], 1.0))
            .collect();
        if !require_simple {
            return Ok(WeightedGraph::from_parts(degrees.len(), edges, false));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        if edges.iter().all(|e| !e.is_loop() && seen.insert((e.u, e.v))) {
            return Ok(WeightedGraph::from_parts(degrees.len(), edges, true));
        }
    }
    Err(GraphError::Sampling {
        attempts,
        detail: "every matching had a loop or a repeated pair".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_infeasible_requests() {
        assert!(sample_truncated_poisson_degrees(10, 14, 0).is_err());
        assert!(DegreeSequence::new(vec![3, 3, 3]).is_err());
        assert!(DegreeSequence::new(vec![2, 4]).is_err());
        let flat = sample_truncated_poisson_degrees(10, 15, 0).unwrap();
        assert!(flat.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn hits_target_and_minimum() {
        for seed in 0..5 {
            let d = sample_truncated_poisson_degrees(1000, 2000, seed).unwrap();
            assert_eq!(d.total(), 4000);
            assert!(d.degrees().iter().all(|&x| x >= 3));
        }
    }

    #[test]
    fn share_of_degree_three() {
        let (count, edges) = (100_000, 200_000);
        let d = sample_truncated_poisson_degrees(count, edges, 11).unwrap();
        let lambda: f64 = 2.687_999_345_499_5;
        let f3 = lambda.exp() - 1.0 - lambda - lambda * lambda / 2.0;
        let expected = lambda.powi(3) / 6.0 / f3;
        let share = d.degrees().iter().filter(|&&x| x == 3).count() as f64 / count as f64;
        assert!((share - expected).abs() < 0.01, "{share} vs {expected}");
    }

    #[test]
    fn sampler_mean_matches_ratio() {
        // Without the sum constraint the mean degree is g_0(λ).
        let lambda = 1.7;
        let law = TruncatedPoisson::new(lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 200_000;
        let mean = (0..draws).map(|_| law.sample(&mut rng) as f64).sum::<f64>() / draws as f64;
        let g0 = crate::special_fn::tail_ratio(3, lambda);
        assert!((mean - g0).abs() < 0.01);
    }

    #[test]
    fn cubic_four_vertex_matching() {
        let d = DegreeSequence::new(vec![3; 4]).unwrap();
        for seed in 0..20 {
            let g = sample_core_multigraph(&d, seed, false).unwrap();
            assert_eq!(g.edge_count(), 6);
            assert_eq!(g.degrees(), vec![3; 4]);
        }
        let simple = sample_core_multigraph(&d, 1, true).unwrap();
        assert!(simple.is_simple());
        assert!(WeightedGraph::new(4, simple.edges().to_vec()).is_ok());
    }

    #[test]
    fn pair_counts_follow_degree_products() {
        let count = 10_000;
        let d = sample_truncated_poisson_degrees(count, 20_000, 5).unwrap();
        let a = 0..100usize;
        let b = 100..200usize;
        let two_m = d.total() as f64;
        let expected_per: f64 = a
            .clone()
            .flat_map(|u| b.clone().map(move |v| (u, v)))
            .map(|(u, v)| (d.degrees()[u] * d.degrees()[v]) as f64 / (two_m - 1.0))
            .sum();
        let trials = 200;
        let observed: usize = (0..trials)
            .map(|s| {
                let g = sample_core_multigraph(&d, s, false).unwrap();
                g.edges()
                    .iter()
                    .filter(|e| a.contains(&e.u) && b.contains(&e.v))
                    .count()
            })
            .sum();
        let expected = expected_per * trials as f64;
        assert!(
            (observed as f64 - expected).abs() < 4.0 * expected.sqrt(),
            "{observed} vs {expected}"
        );
    }
}
