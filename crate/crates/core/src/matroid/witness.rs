use super::{ForestPartition, MatroidError};
use crate::dsu::DisjointSets;
use crate::graph::WeightedGraph;
use serde::{Deserialize, Serialize};

pub const WITNESS_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEdge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
}

/// A forest decomposition in a form that can be checked without the solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub schema: u32,
    pub k: usize,
    pub n: usize,
    pub classes: Vec<Vec<WitnessEdge>>,
}

impl Witness {
    pub fn from_partition(g: &WeightedGraph, partition: &ForestPartition) -> Self {
        let classes = partition
            .classes()
            .into_iter()
            .map(|ids| {
                ids.into_iter()
                    .map(|id| {
                        let e = g.edges()[id];
                        WitnessEdge { id, u: e.u, v: e.v }
                    })
                    .collect()
            })
            .collect();
        Witness {
            schema: WITNESS_SCHEMA,
            k: partition.k(),
            n: g.n(),
            classes,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }
}

/// Checks that every class is a forest of edges of `g` and no edge is used twice.
pub fn validate_witness(g: &WeightedGraph, w: &Witness) -> Result<(), MatroidError> {
    let bad = |msg: String| Err(MatroidError::InvalidWitness(msg));
    if w.schema != WITNESS_SCHEMA {
        return bad(format!("schema {} is not {WITNESS_SCHEMA}", w.schema));
    }
    if w.n != g.n() {
        return bad(format!("witness has {} vertices, graph has {}", w.n, g.n()));
    }
    if w.classes.len() != w.k {
        return bad(format!("{} classes listed for k = {}", w.classes.len(), w.k));
    }
    let mut used = vec![false; g.edge_count()];
    for (class, edges) in w.classes.iter().enumerate() {
        let mut forest = DisjointSets::new(g.n());
        for we in edges {
            let Some(e) = g.edges().get(we.id) else {
                return bad(format!("edge id {} out of range", we.id));
            };
            if std::mem::replace(&mut used[we.id], true) {
                return bad(format!("edge {} appears twice", we.id));
            }
            let (a, b) = (we.u.min(we.v), we.u.max(we.v));
            if (a, b) != (e.u, e.v) {
                return bad(format!(
                    "edge {} is ({}, {}), not ({}, {})",
                    we.id, e.u, e.v, we.u, we.v
                ));
            }
            if e.is_loop() {
                return bad(format!("edge {} is a loop", we.id));
            }
            if !forest.union(e.u, e.v) {
                return bad(format!("class {class} has a cycle through edge {}", we.id));
            }
        }
    }
    Ok(())
}
