//! Truncated exponential series `f_i(x) = sum_{j>=i} x^j / j!`, the ratio
//! functions `g_i(x) = x f_{2-i}(x) / f_{3-i}(x)` and Poisson tails.
//!
//! Internally everything goes through two cancellation-free forms:
//!
//! * the normalised series `q_m(x) = m! f_m(x) / x^m = sum_j x^j m! / (m+j)!`,
//!   used below the switch point `max(1, m)`;
//! * the scaled tail `pi_m(x) = e^{-x} f_m(x)`, used above it, where it is at
//!   least about one half and the subtraction `1 - P(Po(x) < m)` is benign.
//!
//! With `h_m(x) = x f_{m-1}(x) / f_m(x)` (and `f_{-1} = e^x`) the ratio
//! functions are `g_i = h_{3-i}`, and `h_m(x) = x + m / q_m(x)`. At `x = 0`
//! this gives `g_i(0) = 3 - i` without any 0/0.

use crate::roots;
use thiserror::Error;

/// Below `max(SERIES_SWITCH, m)` tails are summed forward as a series.
pub const SERIES_SWITCH: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFnError {
    #[error("argument {0} must be a non-negative number")]
    Domain(f64),
    #[error("ratio index {0} is outside 0..=2")]
    IndexOutOfRange(usize),
    #[error("value {value} is below g_{index}(0) = {min}, so it has no preimage")]
    BelowRange { index: usize, value: f64, min: f64 },
}

/// Index `i` of a ratio function `g_i`, restricted to `0..=2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RatioIndex(u8);

impl RatioIndex {
    pub const ZERO: RatioIndex = RatioIndex(0);
    pub const ONE: RatioIndex = RatioIndex(1);
    pub const TWO: RatioIndex = RatioIndex(2);
    pub const ALL: [RatioIndex; 3] = [Self::ZERO, Self::ONE, Self::TWO];

    pub fn new(i: usize) -> Result<Self, SpecialFnError> {
        match i {
            0..=2 => Ok(RatioIndex(i as u8)),
            _ => Err(SpecialFnError::IndexOutOfRange(i)),
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Order `m = 3 - i` of the tail in the denominator.
    pub fn tail_order(self) -> usize {
        3 - self.get()
    }
}

fn check(x: f64) -> Result<(), SpecialFnError> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(SpecialFnError::Domain(x))
    }
}

/// `f_i(x)`. Relative error near machine precision for every `i`.
pub fn f_tail(i: usize, x: f64) -> Result<f64, SpecialFnError> {
    check(x)?;
    Ok(raw_tail(i, x))
}

/// `g_i(x)`.
pub fn g(i: RatioIndex, x: f64) -> Result<f64, SpecialFnError> {
    check(x)?;
    Ok(tail_ratio(i.tail_order(), x))
}

/// `g_i'(x)`, equal to `1 / (4 - i)` at the origin.
pub fn g_prime(i: RatioIndex, x: f64) -> Result<f64, SpecialFnError> {
    check(x)?;
    Ok(tail_ratio_prime(i.tail_order(), x))
}

/// The unique `x >= 0` with `g_i(x) = y`.
pub fn g_inverse(i: RatioIndex, y: f64) -> Result<f64, SpecialFnError> {
    let min = i.tail_order() as f64;
    if !(y >= min) {
        return Err(SpecialFnError::BelowRange {
            index: i.get(),
            value: y,
            min,
        });
    }
    Ok(tail_ratio_inverse(i.tail_order(), y))
}

/// `P(Po(lambda) >= r) = e^{-lambda} f_r(lambda)`.
pub fn poisson_tail(r: usize, lambda: f64) -> Result<f64, SpecialFnError> {
    check(lambda)?;
    Ok(scaled_tail(r, lambda))
}

fn switch_point(m: usize) -> f64 {
    SERIES_SWITCH.max(m as f64)
}

pub(crate) fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|j| (j as f64).ln()).sum()
}

/// `x^m / m!` as a running product.
fn power_over_factorial(m: usize, x: f64) -> f64 {
    (1..=m).fold(1.0, |acc, j| acc * x / j as f64)
}

/// `q_m(x) = sum_{j>=0} x^j m! / (m+j)!`.
fn normalized_series(m: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..10_000 {
        term *= x / (m + j) as f64;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `q_m(x)` together with its derivative.
fn normalized_series_with_derivative(m: usize, x: f64) -> (f64, f64) {
    // d/dx of x^j m!/(m+j)! is j x^{j-1} m!/(m+j)!; track c_j = m!/(m+j)!.
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = 1.0;
    let mut deriv = 0.0;
    for j in 1..10_000 {
        coeff /= (m + j) as f64;
        deriv += j as f64 * coeff * power;
        power *= x;
        let term = coeff * power;
        sum += term;
        if term <= 1e-17 * sum && j as f64 * coeff * power <= 1e-17 * deriv.max(1e-300) {
            break;
        }
    }
    (sum, deriv)
}

/// `e^{-x} sum_{j<m} x^j / j!`, i.e. `P(Po(x) < m)`.
pub(crate) fn scaled_head(m: usize, x: f64) -> f64 {
    let mut term = (-x).exp();
    let mut sum = 0.0;
    for j in 0..m {
        sum += term;
        term *= x / (j + 1) as f64;
    }
    sum
}

pub(crate) fn raw_tail(i: usize, x: f64) -> f64 {
    if x < switch_point(i) {
        power_over_factorial(i, x) * normalized_series(i, x)
    } else {
        let head: f64 = (0..i)
            .scan(1.0, |term, j| {
                let t = *term;
                *term *= x / (j + 1) as f64;
                Some(t)
            })
            .sum();
        x.exp() - head
    }
}

/// `pi_m(x) = e^{-x} f_m(x)`.
pub(crate) fn scaled_tail(m: usize, x: f64) -> f64 {
    if m == 0 {
        1.0
    } else if x < switch_point(m) {
        ((-x).exp() * power_over_factorial(m, x) * normalized_series(m, x)).min(1.0)
    } else {
        (1.0 - scaled_head(m, x)).max(0.0)
    }
}

/// `ln(f_m(x) / x^m)`, finite at `x = 0` where it equals `-ln m!`.
pub(crate) fn ln_tail_over_power(m: usize, x: f64) -> f64 {
    if x < switch_point(m) {
        normalized_series(m, x).ln() - ln_factorial(m)
    } else {
        x + scaled_tail(m, x).ln() - m as f64 * x.ln()
    }
}

/// `h_m(x) - x = m / q_m(x)`; zero for `m = 0`.
pub(crate) fn tail_excess(m: usize, x: f64) -> f64 {
    if m == 0 {
        0.0
    } else if x < switch_point(m) {
        m as f64 / normalized_series(m, x)
    } else {
        let log_num = m as f64 * x.ln() - x - ln_factorial(m - 1);
        log_num.exp() / scaled_tail(m, x)
    }
}

/// `h_m(x) = x f_{m-1}(x) / f_m(x)`, with `h_0(x) = x`.
pub(crate) fn tail_ratio(m: usize, x: f64) -> f64 {
    x + tail_excess(m, x)
}

/// `h_m'(x)`.
pub(crate) fn tail_ratio_prime(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if x < switch_point(m) {
        let (q, dq) = normalized_series_with_derivative(m, x);
        1.0 - m as f64 * dq / (q * q)
    } else {
        let e_m = tail_excess(m, x);
        let e_prev = tail_excess(m - 1, x);
        (x + e_m) * (1.0 + e_prev - e_m) / x
    }
}

/// Inverse of `h_m` on `[m, inf)`: bisection to width 1e-13, then one Newton step.
pub(crate) fn tail_ratio_inverse(m: usize, y: f64) -> f64 {
    if m == 0 {
        return y;
    }
    if y <= m as f64 {
        return 0.0;
    }
    // x < h_m(x) <= m + x brackets the root.
    let lo = (y - m as f64).max(0.0);
    let hi = y;
    let width = 1e-13f64.max(4.0 * f64::EPSILON * hi);
    let (lo, hi) = roots::bisect(|x| tail_ratio(m, x) - y, lo, hi, width);
    let x = 0.5 * (lo + hi);
    let polished = x - (tail_ratio(m, x) - y) / tail_ratio_prime(m, x);
    if polished >= lo && polished <= hi {
        polished
    } else {
        x
    }
}
