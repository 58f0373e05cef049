//! The first-moment bound `f(w)` over vertex-class fractions `σ_i`, scaled
//! degree totals `Δ_i`, the relative size `τ` of the remaining class and the
//! edge density `μ`, plus its two-variable reduction.
//!
//! Everything is evaluated in log space. Factors `f_m(x)^s / x^D` are split as
//! `s ln(f_m(x)/x^m) - (D - m s) ln x`, which stays finite as `x -> 0`.

use super::{critical_lambda, VerifierError};
use crate::roots;
use crate::special_fn::{ln_tail_over_power, tail_ratio, tail_ratio_inverse, tail_ratio_prime};
use serde::Serialize;
use std::f64::consts::LN_2;

const SLACK: f64 = 1e-12;

/// `x ln x`, with `0 ln 0 = 0`.
pub(crate) fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `a ln b`, zero whenever `a` is zero.
fn xlogy(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * b.ln()
    }
}

/// `τ ln(1 + 1/τ)`, increasing from 0 to 1.
fn tau_profile(tau: f64) -> f64 {
    if tau == 0.0 {
        0.0
    } else {
        tau * (1.0 / tau).ln_1p()
    }
}

fn tau_profile_prime(tau: f64) -> f64 {
    (1.0 / tau).ln_1p() - 1.0 / (1.0 + tau)
}

/// Root `τ` of `τ ln(1 + 1/τ) = 2 - 2σ₀ - σ₁`.
pub fn solve_tau(sigma0: f64, sigma1: f64) -> Result<f64, VerifierError> {
    let sum = 2.0 * sigma0 + sigma1;
    if !(sigma0 >= 0.0 && sigma1 >= 0.0) || sum > 2.0 + SLACK {
        return Err(VerifierError::Domain(format!(
            "(σ0, σ1) = ({sigma0}, {sigma1}) outside 0 <= 2σ0 + σ1 <= 2"
        )));
    }
    let rhs = (2.0 - sum).max(0.0);
    if sum <= 1.0 {
        return Err(VerifierError::NoTau { sum, rhs });
    }
    if rhs == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1e3f64;
    while tau_profile(hi) < rhs {
        hi *= 16.0;
        if !hi.is_finite() {
            return Err(VerifierError::NoTau { sum, rhs });
        }
    }
    let (lo, hi) = roots::bisect(|u| tau_profile(u.exp()) - rhs, f64::MIN_POSITIVE.ln(), hi.ln(), 1e-15);
    let tau = (0.5 * (lo + hi)).exp();
    let polished = tau - (tau_profile(tau) - rhs) / tau_profile_prime(tau);
    let better = polished > 0.0 && (tau_profile(polished) - rhs).abs() < (tau_profile(tau) - rhs).abs();
    Ok(if better { polished } else { tau })
}

/// `G(x) = σ₀ g₀(x) + σ₁ g₁(x) + σ₂ g₂(x)` with `σ₂ = 1 - σ₀ - σ₁`.
pub fn ratio_mix(sigma0: f64, sigma1: f64, x: f64) -> f64 {
    let sigma2 = (1.0 - sigma0 - sigma1).max(0.0);
    sigma0 * tail_ratio(3, x) + sigma1 * tail_ratio(2, x) + sigma2 * tail_ratio(1, x)
}

fn ratio_mix_prime(sigma0: f64, sigma1: f64, x: f64) -> f64 {
    let sigma2 = (1.0 - sigma0 - sigma1).max(0.0);
    sigma0 * tail_ratio_prime(3, x) + sigma1 * tail_ratio_prime(2, x) + sigma2 * tail_ratio_prime(1, x)
}

/// The `x >= 0` with `G(x) = target`. `G(0) = 2σ₀ + σ₁ + 1`, so smaller
/// targets have no preimage.
pub fn ratio_mix_inverse(sigma0: f64, sigma1: f64, target: f64) -> Result<f64, VerifierError> {
    check_fractions(sigma0, sigma1)?;
    let floor = 2.0 * sigma0 + sigma1 + 1.0;
    if target < floor - SLACK {
        return Err(VerifierError::Domain(format!(
            "target {target} is below G(0) = {floor}"
        )));
    }
    if target <= floor {
        return Ok(0.0);
    }
    // x < G(x) <= G(0) + x
    let lo = (target - floor).max(0.0);
    let hi = target;
    let x = roots::newton_increasing(
        |x| {
            (
                ratio_mix(sigma0, sigma1, x) - target,
                ratio_mix_prime(sigma0, sigma1, x),
            )
        },
        lo,
        hi,
        1e-15,
    );
    Ok(x)
}

/// `λ̄` with `G(λ̄) = 4σ₀ + 2σ₁`.
pub fn solve_lambda_bar(sigma0: f64, sigma1: f64) -> Result<f64, VerifierError> {
    check_fractions(sigma0, sigma1)?;
    let sum = 2.0 * sigma0 + sigma1;
    if sum < 1.0 - SLACK {
        return Err(VerifierError::Domain(format!("2σ0 + σ1 = {sum} < 1")));
    }
    ratio_mix_inverse(sigma0, sigma1, 2.0 * sum)
}

fn check_fractions(sigma0: f64, sigma1: f64) -> Result<(), VerifierError> {
    if sigma0 >= 0.0 && sigma1 >= 0.0 && sigma0 + sigma1 <= 1.0 + SLACK {
        Ok(())
    } else {
        Err(VerifierError::Domain(format!(
            "(σ0, σ1) = ({sigma0}, {sigma1}) is not a pair of fractions with sum <= 1"
        )))
    }
}

/// A point `w = (σ₀, σ₁, Δ₀, Δ₁, Δ₂, τ, μ)` of the full bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstraintPoint {
    pub sigma0: f64,
    pub sigma1: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub tau: f64,
    pub mu: f64,
}

impl ConstraintPoint {
    pub fn sigma2(&self) -> f64 {
        (1.0 - self.sigma0 - self.sigma1).max(0.0)
    }

    pub fn delta_sum(&self) -> f64 {
        self.delta0 + self.delta1 + self.delta2
    }

    pub fn delta3(&self) -> f64 {
        2.0 * self.mu - 4.0 - self.delta_sum() + 4.0 * self.sigma0 + 2.0 * self.sigma1
    }

    pub fn nu(&self) -> f64 {
        1.0 + self.tau
    }

    /// The point where the `Δ_i` are spread by a common `λ̄`, `τ` solves the
    /// reduced stationarity equation and `μ = 2(1 + τ)`.
    pub fn optimised(sigma0: f64, sigma1: f64) -> Result<Self, VerifierError> {
        let lambda_bar = solve_lambda_bar(sigma0, sigma1)?;
        let tau = solve_tau(sigma0, sigma1)?;
        let sigma2 = (1.0 - sigma0 - sigma1).max(0.0);
        Ok(ConstraintPoint {
            sigma0,
            sigma1,
            delta0: sigma0 * tail_ratio(3, lambda_bar),
            delta1: sigma1 * tail_ratio(2, lambda_bar),
            delta2: sigma2 * tail_ratio(1, lambda_bar),
            tau,
            mu: 2.0 * (1.0 + tau),
        })
    }

    /// Checks the constraints; `μ` may exceed `2(1 + τ)`.
    pub fn check(&self) -> Result<(), VerifierError> {
        let s2 = 1.0 - self.sigma0 - self.sigma1;
        let checks = [
            (self.sigma0 >= 0.0, "σ0 >= 0"),
            (self.sigma1 >= 0.0, "σ1 >= 0"),
            (s2 >= -SLACK, "σ0 + σ1 <= 1"),
            (self.tau >= 0.0, "τ >= 0"),
            (self.delta0 >= 3.0 * self.sigma0 - SLACK, "Δ0 >= 3σ0"),
            (self.delta1 >= 2.0 * self.sigma1 - SLACK, "Δ1 >= 2σ1"),
            (self.delta2 >= s2 - SLACK, "Δ2 >= 1 - σ0 - σ1"),
            (self.delta3() >= 3.0 * self.tau - SLACK, "Δ3 >= 3τ"),
            (
                self.delta_sum() <= 4.0 * self.sigma0 + 2.0 * self.sigma1 + SLACK,
                "Δ0 + Δ1 + Δ2 <= 4σ0 + 2σ1",
            ),
            (self.mu >= 2.0 * (1.0 + self.tau) - SLACK, "μ >= 2(1 + τ)"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, name)) => Err(VerifierError::Constraint(format!("{name} fails at {self:?}"))),
            None => Ok(()),
        }
    }
}

/// `ln(f_m(x)^s / x^D)` at the `x` minimising it, `g(x) = D/s`; `-inf` when
/// `s = 0 < D` since no degrees can then add up to `D`.
fn class_term(m: usize, s: f64, d: f64) -> f64 {
    if s == 0.0 {
        return if d == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let excess = (d - m as f64 * s).max(0.0);
    if excess == 0.0 {
        return s * ln_tail_over_power(m, 0.0);
    }
    let x = tail_ratio_inverse(m, d / s);
    s * ln_tail_over_power(m, x) - xlogy(excess, x)
}

/// `ln f(w)` for the full seven-variable bound.
pub fn log_f_full(w: &ConstraintPoint) -> Result<f64, VerifierError> {
    w.check()?;
    let lambda = critical_lambda();
    let (s0, s1, s2, tau, mu) = (w.sigma0, w.sigma1, w.sigma2(), w.tau, w.mu);
    let d3 = w.delta3().max(3.0 * tau);
    let entropy = xlogx(tau + 1.0) - xlogx(tau) - xlogx(s0) - xlogx(s1) - xlogx(s2);
    let ln_f3_lambda = ln_tail_over_power(3, lambda) + 3.0 * lambda.ln();
    let base = 2.0 * mu * lambda.ln() - w.nu() * ln_f3_lambda;
    let classes = class_term(3, s0, w.delta0) + class_term(2, s1, w.delta1) + class_term(1, s2, w.delta2);
    let remainder = class_term(3, tau, d3);
    let cross = s1 + 2.0 * s2;
    let cross_term = if cross == 0.0 {
        0.0
    } else if tau == 0.0 {
        f64::NEG_INFINITY
    } else {
        cross * (1.0 + tau.ln())
    };
    let pairing = -s2 * LN_2 + 0.5 * xlogx(w.delta_sum()) + 0.5 * xlogx(d3) - xlogy(mu, 2.0 * mu);
    Ok(entropy + base + classes + remainder + cross_term + pairing)
}

/// `ln f(σ₀, σ₁)` after the optimal `Δ_i`, `τ` and `μ` are substituted.
/// Defined for `2σ₀ + σ₁ > 1`; the line `2σ₀ + σ₁ = 1` is
/// [`log_f_boundary`].
pub fn log_f_reduced(sigma0: f64, sigma1: f64) -> Result<f64, VerifierError> {
    check_fractions(sigma0, sigma1)?;
    let sum = 2.0 * sigma0 + sigma1;
    if sum <= 1.0 {
        return Err(VerifierError::Domain(format!(
            "2σ0 + σ1 = {sum} <= 1; use the boundary formula"
        )));
    }
    let sigma2 = (1.0 - sigma0 - sigma1).max(0.0);
    let tau = solve_tau(sigma0, sigma1)?;
    let lambda_bar = solve_lambda_bar(sigma0, sigma1)?;
    let lambda = critical_lambda();

    let entropy = -xlogx(sigma0) - xlogx(sigma1) - xlogx(sigma2);
    let fixed = lambda.ln() - ln_tail_over_power(3, lambda);
    let classes = sigma0 * ln_tail_over_power(3, lambda_bar)
        + sigma1 * ln_tail_over_power(2, lambda_bar)
        + sigma2 * ln_tail_over_power(1, lambda_bar)
        - xlogy(sum - 1.0, lambda_bar);
    // The τ-dependent factors (τ+1)^{τ+1} τ^{-τ} (eτ)^{2-Σ} (4τ)^{2τ} (4+4τ)^{-2-2τ}
    // collapse, using τ ln(1 + 1/τ) = 2 - Σ, to τ^{2-Σ} / (16 (1 + τ)).
    let tau_part = xlogy(2.0 - sum, tau) - tau.ln_1p() - 4.0 * LN_2;
    let rest = -sigma2 * LN_2 + 0.5 * xlogx(2.0 * sum);
    Ok(entropy + fixed + classes + tau_part + rest)
}

/// `ln f` on the line `2σ₀ + σ₁ = 1`, where `τ -> inf` is optimal:
/// `λ⁴ / (16 f₃(λ)) / (σ₀^{2σ₀} (1-2σ₀)^{1-2σ₀} 3^{σ₀})`.
pub fn log_f_boundary(sigma0: f64) -> Result<f64, VerifierError> {
    if !(0.0..=0.5).contains(&sigma0) {
        return Err(VerifierError::Domain(format!("σ0 = {sigma0} outside [0, 1/2]")));
    }
    let lambda = critical_lambda();
    let fixed = lambda.ln() - ln_tail_over_power(3, lambda) - 4.0 * LN_2;
    Ok(fixed - 2.0 * xlogx(sigma0) - xlogx(1.0 - 2.0 * sigma0) - sigma0 * 3f64.ln())
}

struct Reduced {
    tau: f64,
    ln_lambda_bar: f64,
    t1: f64,
    t2: f64,
    t3: f64,
    ln_twice_sum: f64,
}

fn reduced_parts(sigma0: f64, sigma1: f64) -> Result<Reduced, VerifierError> {
    let lambda_bar = solve_lambda_bar(sigma0, sigma1)?;
    let tau = solve_tau(sigma0, sigma1)?;
    Ok(Reduced {
        tau,
        ln_lambda_bar: lambda_bar.ln(),
        t1: ln_tail_over_power(1, lambda_bar),
        t2: ln_tail_over_power(2, lambda_bar),
        t3: ln_tail_over_power(3, lambda_bar),
        ln_twice_sum: (4.0 * sigma0 + 2.0 * sigma1).ln(),
    })
}

/// `∂ ln f / ∂σ₀` of the reduced bound, from its closed form.
pub fn dlogf_dsigma0(sigma0: f64, sigma1: f64) -> Result<f64, VerifierError> {
    let r = reduced_parts(sigma0, sigma1)?;
    let sigma2 = 1.0 - sigma0 - sigma1;
    Ok((sigma2 / sigma0).ln() + (r.t3 - r.t1 - 2.0 * r.ln_lambda_bar) - 2.0 * r.tau.ln() + LN_2 + 2.0 * r.ln_twice_sum)
}

/// `∂ ln f / ∂σ₁` of the reduced bound.
pub fn dlogf_dsigma1(sigma0: f64, sigma1: f64) -> Result<f64, VerifierError> {
    let r = reduced_parts(sigma0, sigma1)?;
    let sigma2 = 1.0 - sigma0 - sigma1;
    Ok((sigma2 / sigma1).ln() + (r.t2 - r.t1 - r.ln_lambda_bar) - r.tau.ln() + LN_2 + r.ln_twice_sum)
}

/// `(∂₀ - ∂₁) ln f`, the slope along `σ₀ + σ₁ = const`; finite on `σ₂ = 0`.
pub fn dlogf_shift(sigma0: f64, sigma1: f64) -> Result<f64, VerifierError> {
    let r = reduced_parts(sigma0, sigma1)?;
    Ok((sigma1 / sigma0).ln() + (r.t3 - r.t2 - r.ln_lambda_bar) - r.tau.ln() + r.ln_twice_sum)
}

/// `(∂₀ - 2∂₁) ln f`, which must vanish at a stationary point.
pub fn stationary_gap(sigma0: f64, sigma1: f64) -> Result<f64, VerifierError> {
    let lambda_bar = solve_lambda_bar(sigma0, sigma1)?;
    let sigma2 = 1.0 - sigma0 - sigma1;
    let series =
        ln_tail_over_power(1, lambda_bar) + ln_tail_over_power(3, lambda_bar) - 2.0 * ln_tail_over_power(2, lambda_bar);
    Ok((sigma1 * sigma1 / (sigma0 * sigma2)).ln() + series - LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::f_tail;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_interior(rng: &mut ChaCha8Rng) -> (f64, f64) {
        loop {
            let s0: f64 = rng.gen();
            let s1: f64 = rng.gen();
            if s0 + s1 < 1.0 && 2.0 * s0 + s1 > 1.0 + 1e-3 && s0 > 1e-3 && s1 > 1e-3 {
                return (s0, s1);
            }
        }
    }

    #[test]
    fn tau_examples() {
        // plain bisection on the profile as the oracle
        let oracle = |rhs: f64| {
            let (mut lo, mut hi) = (1e-12f64, 1e6f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid * (1.0 + 1.0 / mid).ln() < rhs {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            lo
        };
        let tau = solve_tau(0.5, 0.5).unwrap();
        assert!((tau - oracle(0.5)).abs() < 1e-9 && (tau - 0.397_95).abs() < 1e-5);
        let near = solve_tau(0.99, 0.0).unwrap();
        assert!(near <= 0.004 && (near - 0.003_54).abs() < 1e-5);
        assert_eq!(solve_tau(1.0, 0.0).unwrap(), 0.0);
        assert!(solve_tau(0.999_999, 0.0).unwrap() < 1e-6);
        assert!(matches!(solve_tau(0.25, 0.5), Err(VerifierError::NoTau { .. })));
        let large = solve_tau(0.25, 0.5 + 1e-9).unwrap();
        assert!((tau_profile(large) - (1.0 - 1e-9)).abs() < 1e-12);
    }

    #[test]
    fn lambda_bar_examples() {
        assert!((solve_lambda_bar(1.0, 0.0).unwrap() - critical_lambda()).abs() < 1e-12);
        assert_eq!(solve_lambda_bar(0.3, 0.4).unwrap(), 0.0);
        let x = solve_lambda_bar(0.5, 0.3).unwrap();
        assert!((ratio_mix(0.5, 0.3, x) - 2.6).abs() < 1e-12);
        assert!(solve_lambda_bar(0.2, 0.3).is_err());
    }

    proptest! {
        #[test]
        fn tau_residual(s0 in 0.0f64..1.0, s1 in 0.0f64..1.0) {
            prop_assume!(s0 + s1 <= 1.0 && 2.0 * s0 + s1 > 1.0 + 1e-12);
            let tau = solve_tau(s0, s1).unwrap();
            prop_assert!((tau_profile(tau) - (2.0 - 2.0 * s0 - s1)).abs() <= 1e-12);
        }

        #[test]
        fn lambda_bar_residual_and_bound(s0 in 0.0f64..1.0, s1 in 0.0f64..1.0) {
            prop_assume!(s0 + s1 <= 1.0 && 2.0 * s0 + s1 >= 1.0);
            let x = solve_lambda_bar(s0, s1).unwrap();
            prop_assert!(x <= critical_lambda() + 1e-12);
            prop_assert!((ratio_mix(s0, s1, x) - (4.0 * s0 + 2.0 * s1)).abs() <= 1e-12);
        }
    }

    #[test]
    fn reduced_examples() {
        assert!(log_f_reduced(1.0, 0.0).unwrap().abs() < 1e-12);
        assert!(log_f_reduced(0.5, 0.25).unwrap() <= -0.01);
        assert!(log_f_reduced(0.3, 0.4).is_err());
    }

    /// `f(σ₀, σ₁)` multiplied out directly from the series.
    fn reduced_by_products(s0: f64, s1: f64) -> f64 {
        let s2 = 1.0 - s0 - s1;
        let tau = solve_tau(s0, s1).unwrap();
        let lb = solve_lambda_bar(s0, s1).unwrap();
        let lambda = critical_lambda();
        let f = |i, x| f_tail(i, x).unwrap();
        let sum = 2.0 * s0 + s1;
        // (τ+1)^(τ+1) τ^-τ (4τ)^(2τ) (4+4τ)^-(2+2τ), grouped so large τ does not overflow
        let tau_part = (tau / (1.0 + tau)).powf(tau) / (16.0 * (1.0 + tau));
        tau_part / (s0.powf(s0) * s1.powf(s1) * s2.powf(s2)) * lambda.powi(4) / f(3, lambda)
            * f(3, lb).powf(s0)
            * f(2, lb).powf(s1)
            * f(1, lb).powf(s2)
            / lb.powf(2.0 * sum)
            * (std::f64::consts::E * tau).powf(2.0 - sum)
            / 2f64.powf(s2)
            * (2.0 * sum).powf(sum)
    }

    #[test]
    fn log_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let (s0, s1) = random_interior(&mut rng);
            let direct = reduced_by_products(s0, s1);
            let via_log = log_f_reduced(s0, s1).unwrap().exp();
            assert!(
                (direct - via_log).abs() <= 1e-10 * direct.max(1.0),
                "{s0} {s1}: {direct} {via_log}"
            );
        }
    }

    #[test]
    fn full_bound_reduces() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let (s0, s1) = random_interior(&mut rng);
            let w = ConstraintPoint::optimised(s0, s1).unwrap();
            let full = log_f_full(&w).unwrap();
            let reduced = log_f_reduced(s0, s1).unwrap();
            worst = worst.max((full - reduced).abs());
        }
        assert!(worst <= 1e-9, "{worst}");
    }

    #[test]
    fn full_bound_at_lower_degree_totals() {
        // Σ = 1 with every Δ_i at its lower bound: the class factors reduce to
        // 6^{-σ0} 2^{-σ1}, and the rest is the boundary display with finite τ.
        let (s0, tau) = (0.3, 0.7);
        let s1 = 1.0 - 2.0 * s0;
        let s2 = 1.0 - s0 - s1;
        let w = ConstraintPoint {
            sigma0: s0,
            sigma1: s1,
            delta0: 3.0 * s0,
            delta1: 2.0 * s1,
            delta2: s2,
            tau,
            mu: 2.0 * (1.0 + tau),
        };
        let lambda = critical_lambda();
        let f3 = f_tail(3, lambda).unwrap();
        let expected = (tau + 1.0).powf(tau + 1.0) / (s0.powf(s0) * s1.powf(s1) * s2.powf(s2) * tau.powf(tau))
            * lambda.powi(4)
            / f3
            / 6f64.powf(s0)
            / 2f64.powf(s1)
            * std::f64::consts::E
            * tau
            / 2f64.powf(s2)
            * 2.0
            * (4.0 * tau).powf(2.0 * tau)
            / (4.0 + 4.0 * tau).powf(2.0 + 2.0 * tau);
        assert!((log_f_full(&w).unwrap() - expected.ln()).abs() < 1e-12);
    }

    fn random_feasible(rng: &mut ChaCha8Rng) -> ConstraintPoint {
        loop {
            let (s0, s1) = random_interior(rng);
            let s2 = 1.0 - s0 - s1;
            let room = 2.0 * (2.0 * s0 + s1) - (2.0 * s0 + s1 + 1.0);
            let share: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            let fill = rng.gen::<f64>() * room;
            let norm: f64 = share.iter().sum();
            let tau = rng.gen_range(0.01..3.0);
            let w = ConstraintPoint {
                sigma0: s0,
                sigma1: s1,
                delta0: 3.0 * s0 + fill * share[0] / norm,
                delta1: 2.0 * s1 + fill * share[1] / norm,
                delta2: s2 + fill * share[2] / norm,
                tau,
                mu: 2.0 * (1.0 + tau) + rng.gen_range(0.0..1.0),
            };
            if w.check().is_ok() {
                return w;
            }
        }
    }

    #[test]
    fn decreasing_in_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let w = random_feasible(&mut rng);
            let h = 1e-5;
            let up = ConstraintPoint { mu: w.mu + h, ..w };
            assert!(log_f_full(&up).unwrap() < log_f_full(&w).unwrap(), "{w:?}");
        }
    }

    #[test]
    fn increasing_off_lower_degree_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let mut w = random_feasible(&mut rng);
            w.delta0 = 3.0 * w.sigma0 + 1e-7;
            w.delta1 = 2.0 * w.sigma1 + 1e-7;
            w.delta2 = w.sigma2() + 1e-7;
            let base = log_f_full(&w).unwrap();
            for i in 0..3 {
                let mut up = w;
                match i {
                    0 => up.delta0 += 1e-7,
                    1 => up.delta1 += 1e-7,
                    _ => up.delta2 += 1e-7,
                }
                assert!(log_f_full(&up).unwrap() > base, "Δ{i} at {w:?}");
            }
        }
    }

    #[test]
    fn rejects_infeasible_points() {
        let w = ConstraintPoint {
            sigma0: 0.6,
            sigma1: 0.2,
            delta0: 1.0,
            delta1: 0.4,
            delta2: 0.2,
            tau: 0.5,
            mu: 3.0,
        };
        let err = log_f_full(&w).unwrap_err();
        assert!(err.to_string().contains("Δ0 >= 3σ0"));
    }

    #[test]
    fn boundary_values() {
        let f = |s: f64| log_f_boundary(s).unwrap().exp();
        assert!((f(2.0 - 3f64.sqrt()) - 0.949_86).abs() < 1e-5);
        assert!((f(0.0) - 0.440_83).abs() < 1e-5);
        assert!((f(0.5) - 0.509_03).abs() < 1e-5);
        assert!(log_f_boundary(0.6).is_err());
    }

    #[test]
    fn reduced_meets_boundary() {
        for i in 1..20 {
            let s0 = 0.5 * i as f64 / 20.0;
            let s1 = 1.0 - 2.0 * s0 + 1e-4;
            let gap = (log_f_reduced(s0, s1).unwrap() - log_f_boundary(s0).unwrap()).abs();
            assert!(gap <= 1e-3, "σ0 = {s0}: {gap}");
        }
    }

    #[test]
    fn partials_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (s0, s1) = random_interior(&mut rng);
            if 1.0 - s0 - s1 < 1e-3 || 2.0 * s0 + s1 < 1.01 {
                continue;
            }
            let h = 1e-6;
            let d0 = (log_f_reduced(s0 + h, s1).unwrap() - log_f_reduced(s0 - h, s1).unwrap()) / (2.0 * h);
            let d1 = (log_f_reduced(s0, s1 + h).unwrap() - log_f_reduced(s0, s1 - h).unwrap()) / (2.0 * h);
            assert!((d0 - dlogf_dsigma0(s0, s1).unwrap()).abs() < 1e-5, "{s0} {s1}");
            assert!((d1 - dlogf_dsigma1(s0, s1).unwrap()).abs() < 1e-5);
            assert!((d0 - d1 - dlogf_shift(s0, s1).unwrap()).abs() < 1e-5);
            assert!((d0 - 2.0 * d1 - stationary_gap(s0, s1).unwrap()).abs() < 1e-5);
        }
    }
}
