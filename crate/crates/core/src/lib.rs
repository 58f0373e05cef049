//! Constants, random graph models, graphic matroid union and certified grid
//! searches for the minimum total weight of k edge-disjoint spanning trees in
//! a complete graph with independent uniform edge weights.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod dsu;
mod roots;

mod quadrature;
pub mod special_fn;

pub mod experiments;
pub mod graph;
pub mod matroid;
pub mod mu_constants;
pub mod thresholds;
pub mod verifier;
