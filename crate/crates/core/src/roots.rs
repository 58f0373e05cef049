//! One-dimensional root finding and minimisation used throughout the crate.

/// Bisection for an increasing function with `f(lo) <= 0 <= f(hi)`.
///
/// Stops once the bracket is narrower than `width` or cannot be split further
/// in floating point. Returns the final `(lo, hi)` bracket.
pub(crate) fn bisect<F>(f: F, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Newton's method safeguarded by a bracket, for an increasing function.
///
/// `f` returns the value and derivative. The bracket must satisfy
/// `f(lo) <= 0 <= f(hi)`. Steps leaving the bracket, or failing to halve it
/// often enough, fall back to bisection.
pub(crate) fn newton_increasing<F>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let width = hi - lo;
        if width <= rel_tol * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let step = fx / dfx;
        let candidate = x - step;
        let next = if dfx > 0.0 && candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= rel_tol * x.abs() {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Golden-section search for the minimiser of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_section_min<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}
