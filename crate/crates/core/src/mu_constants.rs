//! The limiting constant for two spanning trees and related closed forms.
//!
//! `mu2 = 2c' - c'^2/4 + ∫_{λ'}^∞ (2 - x/2 + λπ_2/2 - 2π_3) (dx/dλ) dλ`, where
//! `x(λ) = λ / π_2(λ)`, `c'` is the density threshold for two trees and
//! `λ'` its Poisson parameter. The integrand is dominated by `λ^3 e^{-λ}` far
//! out, which gives a closed-form bound on the truncated tail.

use crate::quadrature;
use crate::special_fn::{scaled_head, scaled_tail};
use crate::thresholds::density_threshold_prime;
use serde::Serialize;
use thiserror::Error;

/// Smallest tolerance accepted by [`mu2`].
pub const MIN_TOLERANCE: f64 = 1e-10;

/// The cutoff never goes below this point, where the `λ^3 e^{-λ}` majorant holds.
const MIN_CUTOFF: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MuError {
    #[error("k(n-1) = {needed} edges exceed the {available} edges of K_{n}")]
    Infeasible { n: u64, needed: u128, available: u128 },
    #[error("n must be at least 2 and k at least 1 (got n={n}, k={k})")]
    Arguments { n: u64, k: u64 },
    #[error("lambda must be positive (got {0})")]
    Domain(f64),
    #[error("tolerance {0} is below the attainable floor {MIN_TOLERANCE}")]
    Precision(f64),
    #[error("quadrature did not reach tolerance {0}")]
    Quadrature(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub tail_bound: f64,
    pub cutoff: f64,
}

/// Expected sum of the `k(n-1)` smallest of `C(n,2)` iid uniform weights.
///
/// The `j`-th smallest of `N` uniforms has mean `j/(N+1)`, so the sum is
/// `K(K+1) / (2(N+1))` with `K = k(n-1)`, `N = n(n-1)/2`.
pub fn expected_zk(n: u64, k: u64) -> Result<f64, MuError> {
    if n < 2 || k < 1 {
        return Err(MuError::Arguments { n, k });
    }
    let n128 = n as u128;
    let needed = k as u128 * (n128 - 1);
    let available = n128 * (n128 - 1) / 2;
    if needed > available {
        return Err(MuError::Infeasible { n, needed, available });
    }
    let num = needed * (needed + 1);
    let den = n128 * (n128 - 1) + 2;
    let whole = num / den;
    let rest = num % den;
    Ok(whole as f64 + rest as f64 / den as f64)
}

/// `x = λ / π_2(λ)` and `dx/dλ`.
pub fn x_of_lambda(lambda: f64) -> Result<(f64, f64), MuError> {
    if !(lambda > 0.0) {
        return Err(MuError::Domain(lambda));
    }
    Ok(x_and_slope(lambda))
}

fn x_and_slope(lambda: f64) -> (f64, f64) {
    let p2 = scaled_tail(2, lambda);
    let x = lambda / p2;
    // π_1 - π_2 = λ e^{-λ}
    let slope = (1.0 - lambda * lambda * (-lambda).exp() / p2) / p2;
    (x, slope)
}

/// Integrand of the λ-integral.
pub fn mu2_integrand(lambda: f64) -> f64 {
    let (_, slope) = x_and_slope(lambda);
    // 2 - x/2 + λπ_2/2 - 2π_3 rewritten through the heads a_r = 1 - π_r,
    // which keeps full relative accuracy where the terms nearly cancel.
    let p2 = scaled_tail(2, lambda);
    let a2 = scaled_head(2, lambda);
    let a3 = scaled_head(3, lambda);
    let bracket = 2.0 * a3 - lambda * a2 * (1.0 + p2) / (2.0 * p2);
    bracket * slope
}

/// `∫_Λ^∞ λ^3 e^{-λ} dλ = e^{-Λ}(Λ^3 + 3Λ^2 + 6Λ + 6)`.
pub fn tail_bound(cutoff: f64) -> f64 {
    let l = cutoff;
    (-l).exp() * (((l + 3.0) * l + 6.0) * l + 6.0)
}

/// Smallest cutoff `Λ >= 10` with `tail_bound(Λ) <= budget`.
pub fn cutoff_for(budget: f64) -> f64 {
    if tail_bound(MIN_CUTOFF) <= budget {
        return MIN_CUTOFF;
    }
    let mut hi = 2.0 * MIN_CUTOFF;
    while tail_bound(hi) > budget {
        hi *= 2.0;
    }
    let (_, hi) = crate::roots::bisect(|l| budget - tail_bound(l), MIN_CUTOFF, hi, 1e-12);
    hi
}

/// μ₂ to within `tolerance`, split evenly between quadrature and tail.
pub fn mu2(tolerance: f64) -> Result<QuadratureResult, MuError> {
    if !(tolerance >= MIN_TOLERANCE) {
        return Err(MuError::Precision(tolerance));
    }
    mu2_with_cutoff(tolerance, cutoff_for(tolerance / 2.0))
}

/// μ₂ with an explicit upper limit; the quadrature gets half of `tolerance`.
pub fn mu2_with_cutoff(tolerance: f64, cutoff: f64) -> Result<QuadratureResult, MuError> {
    if !(tolerance >= MIN_TOLERANCE) {
        return Err(MuError::Precision(tolerance));
    }
    let dense = density_threshold_prime(2).expect("two trees is a valid count");
    let (c, start) = (dense.c, dense.lambda);
    let head = 2.0 * c - c * c / 4.0;
    let est = quadrature::integrate(mu2_integrand, start, cutoff, tolerance / 2.0, 10_000)
        .ok_or(MuError::Quadrature(tolerance))?;
    Ok(QuadratureResult {
        value: head + est.value,
        abs_error_estimate: est.error,
        tail_bound: tail_bound(cutoff),
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholds::lambda_core;
    use proptest::prelude::*;

    #[test]
    fn zk_single_edge() {
        assert_eq!(expected_zk(2, 1).unwrap(), 0.5);
    }

    #[test]
    fn zk_small_formula() {
        assert!((expected_zk(5, 2).unwrap() - 8.0 * 9.0 / 22.0).abs() < 1e-15);
    }

    #[test]
    fn zk_matches_order_statistics() {
        // Monte Carlo oracle: sort C(5,2) = 10 uniforms and sum the 8 smallest.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let trials = 200_000;
        let mut total = 0.0;
        for _ in 0..trials {
            let mut w: Vec<f64> = (0..10).map(|_| rng.gen::<f64>()).collect();
            w.sort_by(f64::total_cmp);
            total += w[..8].iter().sum::<f64>();
        }
        let mean = total / trials as f64;
        assert!((mean - expected_zk(5, 2).unwrap()).abs() < 0.01);
    }

    #[test]
    fn zk_large_n() {
        let n = 1_000_000u64;
        let v = expected_zk(n, 2).unwrap();
        assert!((v / 4.0 - 1.0).abs() < 2e-6);
        assert!(v >= 4.0 * (1.0 - 1.0 / n as f64) && v <= 4.0);
    }

    #[test]
    fn zk_infeasible() {
        assert!(matches!(expected_zk(3, 2), Err(MuError::Infeasible { .. })));
        assert!(expected_zk(4, 2).is_ok());
        assert!(expected_zk(1, 1).is_err());
    }

    #[test]
    fn x_at_density_threshold() {
        let t = density_threshold_prime(2).unwrap();
        let (x, _) = x_of_lambda(t.lambda).unwrap();
        assert!((x - 3.59).abs() < 0.005);
        assert!((x - t.c).abs() < 1e-12);
        assert!(x_of_lambda(3.5).unwrap().0 > x);
        assert!(x_of_lambda(0.0).is_err());
    }

    #[test]
    fn slope_matches_central_difference() {
        let h = 1e-5;
        for &l in &[0.5, 2.688, 3.0, 7.0] {
            let fd = (x_of_lambda(l + h).unwrap().0 - x_of_lambda(l - h).unwrap().0) / (2.0 * h);
            let d = x_of_lambda(l).unwrap().1;
            assert!(((fd - d) / d).abs() < 1e-6);
        }
    }

    #[test]
    fn integrand_head_substitution() {
        let t = density_threshold_prime(2).unwrap();
        let l = t.lambda;
        let direct_f2 = l.exp() - 1.0 - l;
        let direct_f3 = direct_f2 - l * l / 2.0;
        let bracket = 2.0 - t.c / 2.0 + l * direct_f2 / (2.0 * l.exp()) - 2.0 * direct_f3 / l.exp();
        let slope = x_of_lambda(l).unwrap().1;
        assert!((mu2_integrand(l) - bracket * slope).abs() < 1e-12);
    }

    #[test]
    fn integrand_sign_and_domination() {
        assert!(mu2_integrand(5.0) > 0.0);
        assert!(mu2_integrand(20.0) <= 20f64.powi(3) * (-20f64).exp());
        for j in 0..=400 {
            let l = 10.0 + j as f64 * 0.1;
            let v = mu2_integrand(l);
            assert!(v > 0.0 && v <= l.powi(3) * (-l).exp(), "λ={l}");
        }
    }

    #[test]
    fn tail_closed_form() {
        assert!((tail_bound(1e-12) - 6.0).abs() < 1e-10);
        assert!(tail_bound(10.0) > tail_bound(20.0));
        let numeric = crate::quadrature::integrate(|l| l.powi(3) * (-l).exp(), 30.0, 200.0, 1e-20, 1000)
            .unwrap()
            .value;
        assert!(((tail_bound(30.0) - numeric) / numeric).abs() < 1e-9);
        assert!((tail_bound(30.0) - 2.8e-9).abs() < 0.05e-9);
    }

    #[test]
    fn mu2_value() {
        let r = mu2(1e-6).unwrap();
        assert!((r.value - 4.170_428_81).abs() < 1e-6);
        assert!(r.abs_error_estimate + r.tail_bound <= 1e-6);
        let tight = mu2(1e-8).unwrap();
        assert!((4.170428..=4.170429).contains(&tight.value));
        assert!(mu2(1e-11).is_err());
    }

    #[test]
    fn mu2_head_formula() {
        let c = density_threshold_prime(2).unwrap().c;
        let r = mu2(1e-8).unwrap();
        let integral = crate::quadrature::integrate(
            mu2_integrand,
            density_threshold_prime(2).unwrap().lambda,
            r.cutoff,
            1e-10,
            10_000,
        )
        .unwrap();
        assert!((r.value - (2.0 * c - c * c / 4.0) - integral.value).abs() < 1e-9);
    }

    #[test]
    fn mu2_cutoff_independent() {
        let tol = 1e-8;
        let base = mu2(tol).unwrap();
        let further = mu2_with_cutoff(tol, base.cutoff + 5.0).unwrap();
        assert!((base.value - further.value).abs() <= tol);
    }

    #[test]
    fn change_of_variables() {
        // Integrate in x directly, recovering λ(x) by root finding.
        let t = density_threshold_prime(2).unwrap();
        let cutoff = 30.0;
        let x_end = x_of_lambda(cutoff).unwrap().0;
        let in_x = crate::quadrature::integrate(
            |x| {
                let l = lambda_core(3, x).unwrap();
                2.0 - x / 2.0 + l * scaled_tail(2, l) / 2.0 - 2.0 * scaled_tail(3, l)
            },
            t.c,
            x_end,
            1e-10,
            10_000,
        )
        .unwrap();
        let in_lambda = crate::quadrature::integrate(mu2_integrand, t.lambda, cutoff, 1e-11, 10_000).unwrap();
        assert!((in_x.value - in_lambda.value).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn zk_sandwich(n in 4u64..5000, k in 1u64..6) {
            prop_assume!(n >= 2 * k);
            let v = expected_zk(n, k).unwrap();
            let kk = (k * k) as f64;
            prop_assert!(v >= kk * (1.0 - 1.0 / n as f64) - 1e-12);
            prop_assert!(v <= kk + 1e-12);
        }
    }
}
