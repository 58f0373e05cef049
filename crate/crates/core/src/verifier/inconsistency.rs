//! The stationarity system for the degree totals has no solution inside
//! `Σ + 1 <= Δ <= 2Σ`, `Σ = 2σ₀ + σ₁`.
//!
//! Two checks: quartic polynomials whose positivity implies the claim are
//! grid-certified, and the scale gap `L₁ - L₂` is sampled directly with `τ`
//! solved from its full stationarity equation.

use super::objective::ratio_mix_inverse;
use super::{best_of, critical_lambda, Extremum, GridReport, VerifierError};
use crate::special_fn::{ln_tail_over_power, tail_ratio_inverse};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// Offsets `u_i` with `6 - 3σ₀ - 2σ₁ >= u_i - 3Σ/2` on the `i`-th σ₁ band.
pub const GAP_SHIFTS: [f64; 4] = [5.5, 5.75, 5.875, 5.9375];
/// Bound on the gradient norm of every gap polynomial over its region.
pub const GAP_GRADIENT_BOUND: f64 = 12755.0;

/// `(Σ, Δ)` region on which the `index`-th polynomial must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapPolynomialRegion {
    pub index: usize,
    pub sum_lo: f64,
    pub sum_hi: f64,
    pub delta_cap: Option<f64>,
}

pub fn gap_polynomial_regions() -> [GapPolynomialRegion; 4] {
    [
        GapPolynomialRegion {
            index: 1,
            sum_lo: 1.1,
            sum_hi: 1.5,
            delta_cap: None,
        },
        GapPolynomialRegion {
            index: 2,
            sum_lo: 1.5,
            sum_hi: 1.75,
            delta_cap: None,
        },
        GapPolynomialRegion {
            index: 3,
            sum_lo: 1.75,
            sum_hi: 1.875,
            delta_cap: Some(3.6),
        },
        GapPolynomialRegion {
            index: 4,
            sum_lo: 1.875,
            sum_hi: 2.0,
            delta_cap: Some(3.6),
        },
    ]
}

/// `λ²Δ(Δ-2)(u_i - 3Σ/2)² - 144(Δ-2)a²b - 576a² - 1728a²b²` with
/// `a = Δ - Σ - 1`, `b = 2Σ - Δ`.
pub fn gap_polynomial(index: usize, sum: f64, delta: f64) -> Result<f64, VerifierError> {
    let u = *GAP_SHIFTS
        .get(index.wrapping_sub(1))
        .ok_or_else(|| VerifierError::Domain(format!("polynomial index {index} outside 1..=4")))?;
    let lambda = critical_lambda();
    let a = delta - sum - 1.0;
    let b = 2.0 * sum - delta;
    let lead = u - 1.5 * sum;
    Ok(lambda * lambda * delta * (delta - 2.0) * lead * lead
        - 144.0 * (delta - 2.0) * a * a * b
        - 576.0 * a * a
        - 1728.0 * a * a * b * b)
}

fn grid_axis(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h - 1e-9).ceil().max(0.0) as usize;
    (0..=n).map(|j| (lo + j as f64 * h).min(hi)).collect()
}

/// Certified minimum of each polynomial on its region; the grid is anchored
/// at the lower-left corner and the top of every column is included.
pub fn verify_gap_polynomials(spacing: f64) -> Result<Vec<GridReport>, VerifierError> {
    if !(spacing > 0.0) {
        return Err(VerifierError::Domain(format!("spacing {spacing} must be positive")));
    }
    gap_polynomial_regions()
        .iter()
        .map(|region| {
            let started = Instant::now();
            let columns: Vec<f64> = grid_axis(region.sum_lo, region.sum_hi, spacing);
            let per_column = columns
                .par_iter()
                .map(|&sum| {
                    let top = region.delta_cap.map_or(2.0 * sum, |cap| cap.min(2.0 * sum));
                    let deltas = grid_axis(sum + 1.0, top, spacing);
                    let values = deltas
                        .iter()
                        .map(|&d| gap_polynomial(region.index, sum, d).map(|v| (v, vec![sum, d])))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((best_of(Extremum::Min, values), deltas.len()))
                })
                .collect::<Result<Vec<_>, VerifierError>>()?;
            let points = per_column.iter().map(|(_, n)| n).sum();
            let worst = best_of(Extremum::Min, per_column.into_iter().map(|(b, _)| b));
            Ok(GridReport::certified(
                &format!("gap-polynomial-{}", region.index),
                spacing,
                Extremum::Min,
                worst,
                GAP_GRADIENT_BOUND,
                0.0,
                None,
                points,
                started,
            ))
        })
        .collect()
}

/// `ln(λ⁴ f₃(y) / (y⁴ f₃(λ)))`.
fn excess_log(y: f64, lambda: f64) -> f64 {
    (ln_tail_over_power(3, y) - y.ln()) - (ln_tail_over_power(3, lambda) - lambda.ln())
}

/// Left side of the full `τ` equation minus its right side `2 - Σ`.
fn tau_residual(z: f64, slack: f64, rhs: f64, lambda: f64) -> f64 {
    let lambda3 = tail_ratio_inverse(3, 4.0 + slack / z);
    z * ((1.0 / z).ln_1p() - 2.0 * (slack / (4.0 * z)).ln_1p() - excess_log(lambda3, lambda)) - rhs
}

/// All roots in `(0, inf)` found by a log-spaced scan, refined by bisection.
fn tau_roots(slack: f64, rhs: f64, lambda: f64) -> Vec<f64> {
    let r = |u: f64| tau_residual(u.exp(), slack, rhs, lambda);
    let mut hi = 1e4f64.ln();
    while r(hi) <= 0.0 && hi < 700.0 {
        hi += 5.0;
    }
    let lo = 1e-10f64.ln();
    let n = 400;
    let us: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = us.iter().map(|&u| r(u)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        if (vals[i] <= 0.0) == (vals[i + 1] <= 0.0) {
            continue;
        }
        let rising = vals[i] <= 0.0;
        let (mut a, mut b) = (us[i], us[i + 1]);
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if (r(mid) <= 0.0) == rising {
                a = mid;
            } else {
                b = mid;
            }
        }
        roots.push((0.5 * (a + b)).exp());
    }
    roots
}

/// Samples `(σ₀, σ₁, Δ)` uniformly, solves the `τ` equation, and checks
/// `L₁ > L₂` with `L₁ = λ₃ sqrt(Δ / (4τ + 2Σ - Δ))` and `G(L₂) = Δ`.
/// Also checks the intermediate bounds `τ <= (1 + 3(2Σ-Δ)²)/(Δ-2)` and
/// `L₂ <= 12(Δ - Σ - 1)/(6 - 3σ₀ - 2σ₁)`.
pub fn verify_l_gap(samples: usize, seed: u64) -> Result<GridReport, VerifierError> {
    let started = Instant::now();
    let lambda = critical_lambda();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, f64, f64)> = (0..samples)
        .map(|_| {
            let (s0, s1) = loop {
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                if a + b <= 1.0 && 2.0 * a + b > 1.0 {
                    break (a, b);
                }
            };
            let sum = 2.0 * s0 + s1;
            (s0, s1, rng.gen_range(sum + 1.0..=2.0 * sum))
        })
        .collect();

    struct Outcome {
        margins: Vec<(f64, Vec<f64>)>,
        waypoint_failures: usize,
        unsolved: usize,
        multiple: usize,
    }
    let outcomes = draws
        .par_iter()
        .map(|&(s0, s1, delta)| {
            let sum = 2.0 * s0 + s1;
            let slack = 2.0 * sum - delta;
            let l2 = ratio_mix_inverse(s0, s1, delta)?;
            let roots = tau_roots(slack, 2.0 - sum, lambda);
            let tau_cap = (1.0 + 3.0 * slack * slack) / (delta - 2.0);
            let l2_cap = 12.0 * (delta - sum - 1.0) / (6.0 - 3.0 * s0 - 2.0 * s1);
            let mut out = Outcome {
                margins: Vec::new(),
                waypoint_failures: 0,
                unsolved: 0,
                multiple: 0,
            };
            if roots.is_empty() {
                out.unsolved = 1;
            }
            if roots.len() > 1 {
                out.multiple = 1;
            }
            if l2 > l2_cap + 1e-9 {
                out.waypoint_failures += 1;
            }
            for tau in roots {
                let lambda3 = tail_ratio_inverse(3, 4.0 + slack / tau);
                let l1 = lambda3 * (delta / (4.0 * tau + slack)).sqrt();
                if tau > tau_cap * (1.0 + 1e-9) {
                    out.waypoint_failures += 1;
                }
                out.margins.push((l1 - l2, vec![s0, s1, delta, tau]));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, VerifierError>>()?;

    let margins: Vec<_> = outcomes.iter().flat_map(|o| o.margins.iter().cloned()).collect();
    let waypoint_failures: usize = outcomes.iter().map(|o| o.waypoint_failures).sum();
    let unsolved: usize = outcomes.iter().map(|o| o.unsolved).sum();
    let multiple: usize = outcomes.iter().map(|o| o.multiple).sum();
    let mut report = GridReport::sampled("scale-gap", &margins, 0.0, started);
    report.violations += waypoint_failures + unsolved;
    if report.violations > 0 {
        report.verdict = super::Verdict::Fail;
    }
    Ok(report
        .with_note(format!("{samples} samples, seed {seed}"))
        .with_note(format!("{waypoint_failures} intermediate-bound failures"))
        .with_note(format!("{unsolved} samples without a τ root, {multiple} with several")))
}
