//! Grid certification that the first-moment bound `f(w)` stays below one,
//! that the stationarity system has no solution, and sampled checks of the
//! inequalities between truncated exponential series that both rely on.
//!
//! A certified grid search evaluates a function on a grid whose covering
//! radius is `spacing`, then adds `lipschitz * spacing` to the extremum. If
//! the result still clears the target, the target holds on the whole region.

mod inconsistency;
mod objective;
mod ratio_bounds;
mod regions;

pub use inconsistency::{
    gap_polynomial, gap_polynomial_regions, verify_gap_polynomials, verify_l_gap, GapPolynomialRegion,
    GAP_GRADIENT_BOUND, GAP_SHIFTS,
};
pub use objective::{
    dlogf_dsigma0, dlogf_dsigma1, dlogf_shift, log_f_boundary, log_f_full, log_f_reduced, ratio_mix, ratio_mix_inverse,
    solve_lambda_bar, solve_tau, stationary_gap, ConstraintPoint,
};
pub use ratio_bounds::verify_ratio_bounds;
pub use regions::{
    boundary_report, interior_band_values, verify_edge_cases, verify_interior_band, FULL_SPACING, INTERIOR_GRID_TARGET,
    INTERIOR_LIPSCHITZ,
};

use serde::Serialize;
use std::sync::OnceLock;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifierError {
    #[error("{0}")]
    Domain(String),
    #[error("2 sigma0 + sigma1 = {sum} <= 1, so tau log(1 + 1/tau) = {rhs} has no finite root")]
    NoTau { sum: f64, rhs: f64 },
    #[error("constraint violated: {0}")]
    Constraint(String),
}

/// `λ` with `g_0(λ) = 4`, the degree parameter of a 3-core of average degree 4.
pub fn critical_lambda() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| crate::special_fn::tail_ratio_inverse(3, 4.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Outcome of a grid certification or of a sampled inequality check.
///
/// For grids, `certified = worst + budget` (maximisation) or `worst - budget`
/// (minimisation) and must clear `target`. Sampled checks carry no budget;
/// `worst` is then the smallest margin seen and `violations` counts failures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub region: String,
    pub spacing: f64,
    pub sense: Extremum,
    pub worst: f64,
    pub worst_point: Vec<f64>,
    pub lipschitz: f64,
    pub budget: f64,
    pub certified: f64,
    pub target: f64,
    /// Extra bound the raw extremum itself must meet, if any.
    pub grid_target: Option<f64>,
    pub verdict: Verdict,
    pub points: usize,
    pub violations: usize,
    pub runtime_secs: f64,
    pub notes: Vec<String>,
}

impl GridReport {
    /// A certified grid result; the verdict follows from the numbers.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn certified(
        region: &str,
        spacing: f64,
        sense: Extremum,
        (worst, worst_point): (f64, Vec<f64>),
        lipschitz: f64,
        target: f64,
        grid_target: Option<f64>,
        points: usize,
        started: Instant,
    ) -> Self {
        let budget = lipschitz * spacing;
        let (certified, ok) = match sense {
            Extremum::Max => (
                worst + budget,
                worst + budget <= target && grid_target.is_none_or(|t| worst <= t),
            ),
            Extremum::Min => (
                worst - budget,
                worst - budget > target && grid_target.is_none_or(|t| worst >= t),
            ),
        };
        GridReport {
            region: region.into(),
            spacing,
            sense,
            worst,
            worst_point,
            lipschitz,
            budget,
            certified,
            target,
            grid_target,
            verdict: Verdict::from_bool(ok && worst.is_finite()),
            points,
            violations: usize::from(!ok),
            runtime_secs: started.elapsed().as_secs_f64(),
            notes: Vec::new(),
        }
    }

    /// A sampled check: `margins` must all exceed `-slack`.
    pub(crate) fn sampled(region: &str, margins: &[(f64, Vec<f64>)], slack: f64, started: Instant) -> Self {
        let violations = margins.iter().filter(|(m, _)| !(*m > -slack)).count();
        let (worst, worst_point) = margins
            .iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .cloned()
            .unwrap_or((f64::INFINITY, Vec::new()));
        GridReport {
            region: region.into(),
            spacing: 0.0,
            sense: Extremum::Min,
            worst,
            worst_point,
            lipschitz: 0.0,
            budget: 0.0,
            certified: worst,
            target: 0.0 - slack,
            grid_target: None,
            verdict: Verdict::from_bool(violations == 0 && !margins.is_empty()),
            points: margins.len(),
            violations,
            runtime_secs: started.elapsed().as_secs_f64(),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Picks the extremum of `(value, point)` pairs; ties go to the
/// lexicographically smallest point so results do not depend on scheduling.
pub(crate) fn best_of<I>(sense: Extremum, items: I) -> (f64, Vec<f64>)
where
    I: IntoIterator<Item = (f64, Vec<f64>)>,
{
    let better = |a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)| {
        let ord = match sense {
            Extremum::Max => a.0.total_cmp(&b.0),
            Extremum::Min => b.0.total_cmp(&a.0),
        };
        ord.then_with(|| {
            b.1.iter()
                .zip(&a.1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    };
    items
        .into_iter()
        .reduce(|acc, item| if better(&item, &acc).is_gt() { item } else { acc })
        .unwrap_or((f64::NAN, Vec::new()))
}
