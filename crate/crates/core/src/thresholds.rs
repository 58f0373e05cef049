//! Emergence and density thresholds for the κ-core of a sparse random graph.
//!
//! The κ-core of `G(n, c/n)` appears once `c` exceeds
//! `inf_λ λ / P(Po(λ) >= κ-1)`, and for larger `c` its size is governed by the
//! larger root `λ` of `c = λ / P(Po(λ) >= κ-1)`.

use crate::roots;
use crate::special_fn::{ln_factorial, scaled_tail, tail_ratio_inverse};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("core order {0} is below 3")]
    CoreOrder(usize),
    #[error("tree count {0} is below 2")]
    TreeCount(usize),
    #[error("average degree {c} is below the core threshold {threshold}")]
    BelowThreshold { c: f64, threshold: f64 },
}

/// A threshold together with its Poisson parameter and the limiting core size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    /// Core order the fractions refer to.
    pub core_order: usize,
    pub c: f64,
    pub lambda: f64,
    /// Core vertices per vertex of the whole graph.
    pub vertex_fraction: f64,
    /// Core edges per vertex of the whole graph.
    pub edge_fraction: f64,
}

impl ThresholdResult {
    fn at(core_order: usize, c: f64, lambda: f64) -> Self {
        let (vertex_fraction, edge_fraction) = fractions_at(core_order, lambda);
        ThresholdResult {
            core_order,
            c,
            lambda,
            vertex_fraction,
            edge_fraction,
        }
    }
}

/// Limiting vertex and edge counts of the κ-core, per vertex of `G(n, c/n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoreFractions {
    pub lambda: f64,
    pub vertex: f64,
    pub edge: f64,
}

fn fractions_at(kappa: usize, lambda: f64) -> (f64, f64) {
    (
        scaled_tail(kappa, lambda),
        lambda * scaled_tail(kappa - 1, lambda) / 2.0,
    )
}

fn poisson_pmf(j: usize, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (j as f64 * lambda.ln() - lambda - ln_factorial(j)).exp()
}

/// `λ / P(Po(λ) >= r)`, the average degree that yields parameter `λ`.
fn degree_for(r: usize, lambda: f64) -> f64 {
    lambda / scaled_tail(r, lambda)
}

/// Value and derivative of `degree_for`.
fn degree_for_with_slope(r: usize, lambda: f64) -> (f64, f64) {
    let pi = scaled_tail(r, lambda);
    let slope = (pi - lambda * poisson_pmf(r - 1, lambda)) / (pi * pi);
    (lambda / pi, slope)
}

/// Emergence threshold `c_κ` of the κ-core and its minimising `λ`.
pub fn core_threshold(kappa: usize) -> Result<ThresholdResult, ThresholdError> {
    if kappa < 3 {
        return Err(ThresholdError::CoreOrder(kappa));
    }
    let r = kappa - 1;
    let rough = roots::golden_section_min(|l| degree_for(r, l), 0.1, 10.0 * kappa as f64, 1e-9);

    // The stationarity condition π_r(λ) = λ P(Po(λ) = r-1) has derivative
    // P(Po(λ) = r-1)(λ - r + 1), so it is increasing to the right of r - 1.
    let stationarity = |l: f64| {
        let pmf = poisson_pmf(r - 1, l);
        (scaled_tail(r, l) - l * pmf, pmf * (l - (r - 1) as f64))
    };
    let floor = (r - 1) as f64;
    let mut lo = (rough - 1e-3).max(floor);
    let mut hi = rough + 1e-3;
    while stationarity(lo).0 > 0.0 && lo > floor {
        lo = (lo - 0.1).max(floor);
    }
    while stationarity(hi).0 < 0.0 {
        hi += 0.1;
    }
    let lambda = roots::newton_increasing(stationarity, lo, hi, 1e-15);
    Ok(ThresholdResult::at(kappa, degree_for(r, lambda), lambda))
}

/// Threshold for `k` edge-disjoint spanning trees, the `(k+1)`-core threshold.
pub fn tree_threshold(k: usize) -> Result<ThresholdResult, ThresholdError> {
    if k < 2 {
        return Err(ThresholdError::TreeCount(k));
    }
    core_threshold(k + 1)
}

/// The larger root `λ` of `c = λ / P(Po(λ) >= κ-1)`.
pub fn lambda_core(kappa: usize, c: f64) -> Result<f64, ThresholdError> {
    let threshold = core_threshold(kappa)?;
    if !(c >= threshold.c) {
        return Err(ThresholdError::BelowThreshold {
            c,
            threshold: threshold.c,
        });
    }
    let r = kappa - 1;
    let lo = threshold.lambda;
    let hi = c.max(lo);
    if c == threshold.c {
        return Ok(lo);
    }
    Ok(roots::newton_increasing(
        |l| {
            let (v, d) = degree_for_with_slope(r, l);
            (v - c, d)
        },
        lo,
        hi,
        1e-15,
    ))
}

/// Average degree at which the `(k+1)`-core reaches average degree `2k`.
pub fn density_threshold_prime(k: usize) -> Result<ThresholdResult, ThresholdError> {
    if k < 2 {
        return Err(ThresholdError::TreeCount(k));
    }
    // λ f_k / f_{k+1} is the order-(k+1) tail ratio.
    let lambda = tail_ratio_inverse(k + 1, 2.0 * k as f64);
    Ok(ThresholdResult::at(k + 1, degree_for(k, lambda), lambda))
}

/// Limiting κ-core size in `G(n, c/n)` for `c` above the core threshold.
pub fn core_fractions(kappa: usize, c: f64) -> Result<CoreFractions, ThresholdError> {
    let lambda = lambda_core(kappa, c)?;
    let (vertex, edge) = fractions_at(kappa, lambda);
    Ok(CoreFractions { lambda, vertex, edge })
}
