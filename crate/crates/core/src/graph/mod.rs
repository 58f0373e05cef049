//! Weighted graphs, random graph models and core peeling.
//!
//! Text format: a header line `n m` followed by `m` lines `u v weight`.
//! Weights are written in shortest round-trip form, so writing and reading
//! back reproduces every bit.

mod configuration;
mod kcore;
mod random;

pub use configuration::{sample_core_multigraph, sample_truncated_poisson_degrees, DegreeSequence};
pub use kcore::{core_subgraph, kcore, kcore_random_order, CorePeelResult};
pub use random::{sample_complete_weights, sample_gnm, sample_gnp, WeightMode, MAX_COMPLETE_EDGES};

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {index} has endpoint outside 0..{n}: ({u}, {v})")]
    Endpoint { index: usize, u: usize, v: usize, n: usize },
    #[error("edge {index} is a loop at vertex {u}")]
    Loop { index: usize, u: usize },
    #[error("edge {index} duplicates ({u}, {v})")]
    Duplicate { index: usize, u: usize, v: usize },
    #[error("edge {index} has weight {weight} outside [0, 1]")]
    Weight { index: usize, weight: f64 },
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("{requested} edges exceed the budget of {max}")]
    Capacity { requested: u128, max: u128 },
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("sampling failed after {attempts} attempts: {detail}")]
    Sampling { attempts: usize, detail: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, weight: f64) -> Self {
        Edge {
            u: u.min(v),
            v: u.max(v),
            weight,
        }
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Undirected graph on `0..n` whose edges carry weights in `[0, 1]`.
///
/// Simple graphs have `u < v` and no repeated pairs. Multigraphs (from the
/// configuration model) may contain loops and parallel edges.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    simple: bool,
}

impl WeightedGraph {
    /// Builds a simple graph, normalising every edge to `u < v`.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let edges: Vec<Edge> = edges.into_iter().map(|e| Edge::new(e.u, e.v, e.weight)).collect();
        let mut seen = HashSet::with_capacity(edges.len());
        for (index, e) in edges.iter().enumerate() {
            check_edge(index, e, n)?;
            if e.is_loop() {
                return Err(GraphError::Loop { index, u: e.u });
            }
            if !seen.insert((e.u, e.v)) {
                return Err(GraphError::Duplicate { index, u: e.u, v: e.v });
            }
        }
        Ok(WeightedGraph { n, edges, simple: true })
    }

    /// Builds a multigraph; loops and parallel edges are allowed.
    pub fn multigraph(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let edges: Vec<Edge> = edges.into_iter().map(|e| Edge::new(e.u, e.v, e.weight)).collect();
        for (index, e) in edges.iter().enumerate() {
            check_edge(index, e, n)?;
        }
        Ok(WeightedGraph {
            n,
            edges,
            simple: false,
        })
    }

    /// Simple graph with unit weights.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(n, pairs.iter().map(|&(u, v)| Edge::new(u, v, 1.0)).collect())
    }

    /// Multigraph with unit weights.
    pub fn multigraph_from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::multigraph(n, pairs.iter().map(|&(u, v)| Edge::new(u, v, 1.0)).collect())
    }

    /// Trusted constructor for generators that already guarantee validity.
    pub(crate) fn from_parts(n: usize, edges: Vec<Edge>, simple: bool) -> Self {
        WeightedGraph { n, edges, simple }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_simple(&self) -> bool {
        self.simple
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Degrees counting multiplicity, loops twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Incident edge ids per vertex; a loop appears once in its vertex's list.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            inc[e.u].push(id);
            if !e.is_loop() {
                inc[e.v].push(id);
            }
        }
        inc
    }

    /// Subgraph induced by `vertices`, relabelled to `0..vertices.len()` in the
    /// given order. Also returns the original ids of the kept edges.
    pub fn induced(&self, vertices: &[usize]) -> (WeightedGraph, Vec<usize>) {
        let mut label = vec![usize::MAX; self.n];
        for (new, &old) in vertices.iter().enumerate() {
            label[old] = new;
        }
        let (edges, ids): (Vec<Edge>, Vec<usize>) = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| label[e.u] != usize::MAX && label[e.v] != usize::MAX)
            .map(|(id, e)| (Edge::new(label[e.u], label[e.v], e.weight), id))
            .unzip();
        (WeightedGraph::from_parts(vertices.len(), edges, self.simple), ids)
    }

    /// Same vertex set, keeping only the listed edges.
    pub fn with_edges(&self, ids: &[usize]) -> WeightedGraph {
        let edges = ids.iter().map(|&id| self.edges[id]).collect();
        WeightedGraph::from_parts(self.n, edges, self.simple)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight);
        }
        out
    }

    /// Parses the edge-list format. Blank lines and `#` comments are skipped.
    /// The result is simple when possible and a multigraph otherwise.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(parse_error(hline, "header must be `n m`"));
        }
        let n: usize = head[0].parse().map_err(|_| parse_error(hline, "bad vertex count"))?;
        let m: usize = head[1].parse().map_err(|_| parse_error(hline, "bad edge count"))?;
        let mut edges = Vec::with_capacity(m);
        for (line, body) in lines {
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(parse_error(line, "edge line must be `u v weight`"));
            }
            let u = parts[0].parse().map_err(|_| parse_error(line, "bad endpoint"))?;
            let v = parts[1].parse().map_err(|_| parse_error(line, "bad endpoint"))?;
            let w = parts[2].parse().map_err(|_| parse_error(line, "bad weight"))?;
            edges.push(Edge::new(u, v, w));
        }
        if edges.len() != m {
            return Err(parse_error(
                hline,
                &format!("header promises {m} edges, found {}", edges.len()),
            ));
        }
        match WeightedGraph::new(n, edges.clone()) {
            Ok(g) => Ok(g),
            Err(GraphError::Loop { .. } | GraphError::Duplicate { .. }) => Self::multigraph(n, edges),
            Err(e) => Err(e),
        }
    }
}

fn parse_error(line: usize, message: &str) -> GraphError {
    GraphError::Parse {
        line,
        message: message.to_string(),
    }
}

fn check_edge(index: usize, e: &Edge, n: usize) -> Result<(), GraphError> {
    if e.v >= n {
        return Err(GraphError::Endpoint {
            index,
            u: e.u,
            v: e.v,
            n,
        });
    }
    if !(0.0..=1.0).contains(&e.weight) {
        return Err(GraphError::Weight {
            index,
            weight: e.weight,
        });
    }
    Ok(())
}
