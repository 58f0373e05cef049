//! Grid certification of `ln f(σ₀, σ₁) <= 0` over
//! `E = {σ₀, σ₁ >= 0, σ₀ + σ₁ <= 1, 2σ₀ + σ₁ >= 1}`.
//!
//! The partial derivatives of `ln f` are bounded above (by 25 in `σ₀` and 15
//! in `σ₁` on the interior band `0.01 <= σ₁ <= 0.99`, by 21 on `σ₁ = 0`), so
//! a grid covering every point from below within `δ` in each coordinate
//! certifies the region once `max + budget * δ <= 0`. The remaining edges are
//! handled by sign checks of the closed-form derivatives.

use super::objective::{
    dlogf_dsigma0, dlogf_shift, log_f_boundary, log_f_reduced, solve_lambda_bar, solve_tau, stationary_gap,
};
use super::{best_of, Extremum, GridReport, VerifierError};
use crate::special_fn::tail_ratio;
use rayon::prelude::*;
use std::time::Instant;

pub const FULL_SPACING: f64 = 1.0 / 4000.0;
/// Sum of the two partial-derivative bounds on the interior band.
pub const INTERIOR_LIPSCHITZ: f64 = 40.0;
/// The grid maximum must itself reach -0.0105, up to inner-solve error 1e-4.
pub const INTERIOR_GRID_TARGET: f64 = -0.0105 + 1e-4;
const SIGMA1_ZERO_BUDGET: f64 = 21.0;
const BAND: (f64, f64) = (0.01, 0.99);
const SNAP: f64 = 1e-9;

/// `lo, lo + h, ...` up to `hi`, with the last point snapped onto `hi` when it
/// lands within rounding of it. `hi` is appended if the steps stop short.
fn steps(lo: f64, hi: f64, h: f64, include_hi: bool) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 0u64;
    loop {
        let x = lo + j as f64 * h;
        if x > hi + SNAP {
            break;
        }
        out.push(if (x - hi).abs() <= SNAP { hi } else { x });
        j += 1;
    }
    if include_hi && out.last().is_some_and(|&x| x < hi) {
        out.push(hi);
    }
    out
}

/// Rows of the interior grid: for each `σ₁`, the `σ₀` strictly above the
/// boundary line, anchored on it, plus the edge σ₂ = 0.
fn interior_rows(delta: f64) -> Vec<(f64, Vec<f64>)> {
    steps(BAND.0, BAND.1, delta, true)
        .into_iter()
        .map(|s1| {
            let floor = (1.0 - s1) / 2.0;
            let row = steps(floor, 1.0 - s1, delta, true).into_iter().skip(1).collect();
            (s1, row)
        })
        .collect()
}

fn check_spacing(delta: f64) -> Result<(), VerifierError> {
    if delta > 0.0 && delta <= 0.01 {
        Ok(())
    } else {
        Err(VerifierError::Domain(format!("spacing {delta} outside (0, 0.01]")))
    }
}

/// Every interior grid point as `[σ₀, σ₁, ln f]`, row by row.
pub fn interior_band_values(delta: f64) -> Result<Vec<[f64; 3]>, VerifierError> {
    check_spacing(delta)?;
    interior_rows(delta)
        .into_par_iter()
        .map(|(s1, row)| {
            row.into_iter()
                .map(|s0| log_f_reduced(s0, s1).map(|v| [s0, s1, v]))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|rows| rows.concat())
}

/// Certifies `ln f <= 0` on the band `0.01 <= σ₁ <= 0.99`.
pub fn verify_interior_band(delta: f64) -> Result<GridReport, VerifierError> {
    check_spacing(delta)?;
    let started = Instant::now();
    let rows = interior_rows(delta);
    let per_row = rows
        .par_iter()
        .map(|(s1, row)| {
            let values = row
                .iter()
                .map(|&s0| log_f_reduced(s0, *s1).map(|v| (v, vec![s0, *s1])))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((best_of(Extremum::Max, values), row.len()))
        })
        .collect::<Result<Vec<_>, VerifierError>>()?;
    let points = per_row.iter().map(|(_, n)| n).sum();
    let worst = best_of(
        Extremum::Max,
        per_row.into_iter().map(|(b, _)| b).filter(|b| !b.1.is_empty()),
    );
    Ok(GridReport::certified(
        "interior-band",
        delta,
        Extremum::Max,
        worst,
        INTERIOR_LIPSCHITZ,
        0.0,
        Some(INTERIOR_GRID_TARGET),
        points,
        started,
    )
    .with_note("grid rows anchored on the line 2σ0 + σ1 = 1, which the boundary report covers"))
}

/// The line `2σ₀ + σ₁ = 1`. `ln f` is concave in `σ₀` there, so the grid
/// plus the stationary point `2 - √3` gives the exact maximum.
pub fn boundary_report(spacing: f64) -> Result<GridReport, VerifierError> {
    let started = Instant::now();
    let mut xs = steps(0.0, 0.5, spacing, true);
    xs.push(2.0 - 3f64.sqrt());
    let values = xs
        .iter()
        .map(|&s0| log_f_boundary(s0).map(|v| (v, vec![s0, 1.0 - 2.0 * s0])))
        .collect::<Result<Vec<_>, _>>()?;
    let points = values.len();
    Ok(GridReport::certified(
        "boundary-line",
        spacing,
        Extremum::Max,
        best_of(Extremum::Max, values),
        0.0,
        -0.01,
        None,
        points,
        started,
    )
    .with_note("concave along the line; maximiser 2 - sqrt(3) included"))
}

fn margins<F>(xs: impl IntoIterator<Item = (f64, f64)>, f: F) -> Result<Vec<(f64, Vec<f64>)>, VerifierError>
where
    F: Fn(f64, f64) -> Result<f64, VerifierError>,
{
    xs.into_iter().map(|(a, b)| f(a, b).map(|m| (m, vec![a, b]))).collect()
}

/// Points of `[lo, hi)` accumulating at `hi`: a uniform grid plus `hi - 10^{-j}`.
fn toward(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect();
    xs.extend((3..=12).map(|j| hi - 10f64.powi(-j)).filter(|&x| x >= lo));
    xs
}

/// The pieces of `E` outside the interior band.
pub fn verify_edge_cases(delta: f64) -> Result<Vec<GridReport>, VerifierError> {
    check_spacing(delta)?;
    let mut reports = Vec::new();

    // σ₁ = 0 and σ₀ <= 0.99: certified grid.
    let started = Instant::now();
    let xs: Vec<f64> = steps(0.5, 0.99, delta, true).into_iter().skip(1).collect();
    let values = xs
        .par_iter()
        .map(|&s0| log_f_reduced(s0, 0.0).map(|v| (v, vec![s0, 0.0])))
        .collect::<Result<Vec<_>, _>>()?;
    let count = values.len();
    reports.push(GridReport::certified(
        "sigma1-zero",
        delta,
        Extremum::Max,
        best_of(Extremum::Max, values),
        SIGMA1_ZERO_BUDGET,
        0.0,
        None,
        count,
        started,
    ));

    // σ₁ = 0, σ₀ >= 0.99: ln f increases towards f(1, 0) = 1.
    let started = Instant::now();
    let mut m = margins(toward(0.99, 1.0, 2000).into_iter().map(|s0| (s0, 0.0)), dlogf_dsigma0)?;
    m.push((0.004 - solve_tau(0.99, 0.0)?, vec![0.99, 0.0]));
    reports.push(
        GridReport::sampled("sigma1-zero-near-corner", &m, 0.0, started)
            .with_note("∂0 ln f > 0 and τ(0.99, 0) <= 0.004"),
    );

    // σ₀ + σ₁ = 1, σ₁ < 0.01: slope along the edge towards (1, 0) is positive.
    let started = Instant::now();
    let m = margins(
        toward(0.99, 1.0, 2000).into_iter().map(|s0| (s0, 1.0 - s0)),
        dlogf_shift,
    )?;
    reports.push(GridReport::sampled("full-edge-small-sigma1", &m, 0.0, started));

    // 0 < σ₁ < 0.01 inside: where (∂0 - 2∂1) ln f can vanish, (∂0 - ∂1) ln f > 0.
    let started = Instant::now();
    let mut pts = Vec::new();
    for i in 1..100 {
        let s1 = 0.01 * i as f64 / 100.0;
        let lo = (1.0 - 1.1 * s1).max((1.0 - s1) / 2.0);
        let hi = 1.0 - s1;
        pts.extend((0..50).map(|j| (lo + (hi - lo) * j as f64 / 50.0, s1)));
    }
    let chain = (500f64.ln() / 2.2).ln() + 0.09f64.ln() + 3.976f64.ln();
    let mut m = margins(pts, dlogf_shift)?;
    m.push((chain, vec![]));
    reports.push(
        GridReport::sampled("near-corner-interior", &m, 0.0, started).with_note(format!(
            "lower bound ln(ln 500 / 2.2) + ln 0.09 + ln 3.976 = {chain:.6}"
        )),
    );

    // σ₀ + σ₁ = 1, σ₀ < 0.01: slope towards (0.01, 0.99) is positive.
    let started = Instant::now();
    let xs: Vec<f64> = (1..=1000)
        .map(|i| 0.01 * i as f64 / 1000.0)
        .chain((3..=12).map(|j| 10f64.powi(-j)))
        .collect();
    let mut m = margins(xs.iter().map(|&s0| (s0, 1.0 - s0)), dlogf_shift)?;
    for &s0 in &xs {
        let lb = solve_lambda_bar(s0, 1.0 - s0)?;
        let tau = solve_tau(s0, 1.0 - s0)?;
        let g0 = tail_ratio(3, lb);
        m.push((6.0 - lb * tau, vec![s0, 1.0 - s0]));
        m.push(((g0 - 3.0).min(4.0 - g0), vec![s0, 1.0 - s0]));
    }
    reports.push(
        GridReport::sampled("full-edge-small-sigma0", &m, 1e-12, started)
            .with_note("slope > 0, λ̄τ <= 6 and 3 <= g0(λ̄) <= 4"),
    );

    // λ̄τ >= 1e-4 across the band.
    let started = Instant::now();
    let coarse = delta.max(1.0 / 400.0);
    let pts: Vec<(f64, f64)> = interior_rows(coarse)
        .into_iter()
        .flat_map(|(s1, row)| row.into_iter().map(move |s0| (s0, s1)))
        .collect();
    let m = margins(pts, |s0, s1| Ok(solve_lambda_bar(s0, s1)? * solve_tau(s0, s1)? - 1e-4))?;
    reports.push(GridReport::sampled("band-lambda-tau-floor", &m, 0.0, started));

    reports.push(stationary_report()?);
    Ok(reports)
}

/// Roots of `(∂0 - 2∂1) ln f` along rows of constant `σ₁` all have
/// `σ₁ < 1/2`, `2 <= σ₁²/(σ₀σ₂) <= 4` and `σ₀ >= (1 - σ₁)/2 + sqrt(1 - 2σ₁ - σ₁²)/2`.
fn stationary_report() -> Result<GridReport, VerifierError> {
    let started = Instant::now();
    let mut m = Vec::new();
    let mut scanned_high_rows = 0;
    for i in 1..400 {
        let s1 = i as f64 / 400.0;
        let lo = (1.0 - s1) / 2.0;
        let hi = 1.0 - s1;
        let xs: Vec<f64> = (1..400).map(|j| lo + (hi - lo) * j as f64 / 400.0).collect();
        let vals = xs
            .iter()
            .map(|&s0| stationary_gap(s0, s1))
            .collect::<Result<Vec<_>, _>>()?;
        if s1 >= 0.5 {
            scanned_high_rows += 1;
        }
        for w in 0..xs.len() - 1 {
            if vals[w].signum() == vals[w + 1].signum() {
                continue;
            }
            let (mut a, mut b) = (xs[w], xs[w + 1]);
            let rising = vals[w] < 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if (stationary_gap(mid, s1)? < 0.0) == rising {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let s0 = 0.5 * (a + b);
            // σ₁² >= 2σ₀σ₂ has no real boundary once 1 - 2σ₁ - σ₁² < 0
            let radicand = (1.0 - 2.0 * s1 - s1 * s1).max(0.0);
            let floor = (1.0 - s1) / 2.0 + radicand.sqrt() / 2.0;
            let ratio = s1 * s1 / (s0 * (1.0 - s0 - s1));
            let margin = (0.5 - s1).min(s0 - floor).min(ratio - 2.0).min(4.0 - ratio);
            m.push((margin, vec![s0, s1]));
        }
    }
    Ok(
        GridReport::sampled("stationary-points", &m, 1e-9, started).with_note(format!(
            "{} roots found; {scanned_high_rows} rows with σ1 >= 1/2 scanned",
            m.len()
        )),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_snap_and_cover() {
        assert_eq!(steps(0.0, 1.0, 0.25, false), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let s = steps(0.0, 1.0, 0.3, true);
        assert_eq!(s.last(), Some(&1.0));
        assert_eq!(s.len(), 5);
        let rows = interior_rows(0.01);
        assert_eq!(rows.first().unwrap().0, 0.01);
        assert_eq!(rows.last().unwrap().0, 0.99);
        // corner (0.99, 0.01) lies on the grid
        assert_eq!(*rows[0].1.last().unwrap(), 0.99);
    }

    #[test]
    fn coarse_interior_grid() {
        let r = verify_interior_band(0.01).unwrap();
        assert!(r.worst <= INTERIOR_GRID_TARGET, "{r:?}");
        // 40 * 0.01 is far too coarse to certify
        assert!(!r.passed());
        assert!(verify_interior_band(0.02).is_err());
    }

    #[test]
    fn refinement_stays_within_budget() {
        // A point's value and the values on a 10x finer patch above it differ
        // by less than the budget for the patch.
        for &(s0, s1) in &[(0.6, 0.2), (0.9, 0.05), (0.3, 0.5), (0.985, 0.012)] {
            let base = log_f_reduced(s0, s1).unwrap();
            let fine = 0.001;
            for a in 0..10 {
                for b in 0..10 {
                    let (x, y) = (s0 + a as f64 * fine / 10.0, s1 + b as f64 * fine / 10.0);
                    if x + y > 1.0 {
                        continue;
                    }
                    let v = log_f_reduced(x, y).unwrap();
                    assert!(v <= base + INTERIOR_LIPSCHITZ * fine, "{x} {y}");
                }
            }
        }
    }

    #[test]
    fn boundary_line() {
        let r = boundary_report(0.001).unwrap();
        assert!(r.passed());
        assert!((r.worst - 0.949_86f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn edge_cases_pass() {
        let reports = verify_edge_cases(0.001).unwrap();
        for r in &reports {
            assert!(r.passed(), "{r:#?}");
        }
        let zero = &reports[0];
        assert!((zero.worst - -0.0695).abs() < 1e-3);
        let chain = reports.iter().find(|r| r.region == "near-corner-interior").unwrap();
        assert!(chain.notes[0].contains("0.0107"));
    }
}
