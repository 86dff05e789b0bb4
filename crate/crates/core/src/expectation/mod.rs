//! Exact expected trip time.
//!
//! Two evaluators are provided and they do not agree in general:
//!
//! - [`expected_time_recursive`] computes the expectation of the sampler's
//!   total trip time, truncated at a depth cutoff:
//!   `E_k(m, s) = Σ_n p_n(m, s) [T_n c_m + α_k Σ_{m'} p_{m'n} E_{k+1}(m', n)]`
//!   where `c_m` is the expected pool dwell factor and the `α_k` term is
//!   dropped once `k` passes the cutoff.
//! - [`expected_time_collapsed`] evaluates the closed form
//!   `Σ_n Σ_m p_mn p_n T_n + Σ_x Σ_n Σ_m α_x p_mn² T_n` term by term, with
//!   `p_n` the start pair's landing distribution and `p_mn` the hop
//!   probabilities on `n` seen from the start personality.
//!
//! [`compare_evaluators`] reports both and their difference.
//! [`enumerate_trips`] is a brute-force path enumerator that serves as the
//! oracle for the recursive evaluator.

mod enumerate;

pub use enumerate::{enumerate_trips, enumerate_trips_with_limit, EnumeratedPath, Enumeration, DEFAULT_PATH_LIMIT};

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Landing};
use crate::landscape::{
    hop_distribution, landing_distribution, ContinuationSchedule, Landscape, PlatformId, StartPair,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub value_seconds: f64,
    pub cutoff_used: u32,
    /// Upper bound on the expected time omitted by the cutoff.
    pub truncation_bound: f64,
}

/// Upper bound on the time beyond `depth_cutoff` extensions: a stage after
/// extension `j` is reached with probability at most `Π_{x ≤ j} α_x` and
/// accrues at most `max_stage_dwell`.
pub(crate) fn truncation_bound(schedule: &ContinuationSchedule, depth_cutoff: u32, max_stage_dwell: f64) -> f64 {
    let mut reach = 1.0;
    let mut bound = 0.0;
    let mut stage = 1u32;
    loop {
        reach *= schedule.alpha(stage);
        if reach <= 0.0 || reach < f64::MIN_POSITIVE {
            break;
        }
        if stage > depth_cutoff {
            let before = bound;
            bound += reach;
            if bound == before {
                break;
            }
        }
        stage = match stage.checked_add(1) {
            Some(s) => s,
            None => break,
        };
    }
    bound * max_stage_dwell
}

/// Expected total trip time under the sampler's semantics, with at most
/// `depth_cutoff` extensions.
pub fn expected_time_recursive(
    landscape: &Landscape,
    start: &StartPair,
    depth_cutoff: u32,
) -> Result<ExpectationResult> {
    let field = Field::new(landscape)?;
    let (m0, s0) = Field::start(landscape, start)?;
    let (n_pers, n_plat) = (field.n_personalities, field.n_platforms);
    let dwell_factor: Vec<f64> = field
        .pools
        .iter()
        .map(|pool| match pool {
            Some((rho, lambda)) => 1.0 + rho * (lambda - 1.0),
            None => 1.0,
        })
        .collect();

    // `next[m * n_plat + s]` holds E_{k+1}(m, s) while layer k is computed.
    let mut next = vec![0.0; n_pers * n_plat];
    let mut current = vec![0.0; n_pers * n_plat];
    for k in (1..=depth_cutoff.saturating_add(1)).rev() {
        let alpha = if k <= depth_cutoff { field.schedule.alpha(k) } else { 0.0 };
        for m in 0..n_pers {
            for s in 0..n_plat {
                let Landing::Ok(landing) = field.landing(m, s) else {
                    current[m * n_plat + s] = 0.0;
                    continue;
                };
                let mut value = 0.0;
                for &(n, p_n) in landing {
                    let mut stage = field.dwell[n] * dwell_factor[m];
                    if alpha > 0.0 {
                        let onward: f64 = field
                            .hops(n, m)
                            .targets
                            .iter()
                            .map(|&(m2, p)| p * next[m2 * n_plat + n])
                            .sum();
                        stage += alpha * onward;
                    }
                    value += p_n * stage;
                }
                current[m * n_plat + s] = value;
            }
        }
        core::mem::swap(&mut current, &mut next);
    }
    Ok(ExpectationResult {
        value_seconds: next[m0 * n_plat + s0],
        cutoff_used: depth_cutoff,
        truncation_bound: truncation_bound(&field.schedule, depth_cutoff, field.max_stage_dwell()),
    })
}

/// How many continuation probabilities enter the closed form's second term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSum {
    /// `Σ_{x=1}^{stages} α_x`, term by term.
    Truncated { stages: u32 },
    /// The full series; `a / (1 − a)` for geometric schedules.
    Exact,
}

impl AlphaSum {
    fn evaluate(self, schedule: &ContinuationSchedule) -> f64 {
        match self {
            AlphaSum::Truncated { stages } => schedule.partial_sum(stages),
            AlphaSum::Exact => schedule.total_sum(),
        }
    }

    fn omitted(self, schedule: &ContinuationSchedule) -> f64 {
        match self {
            AlphaSum::Truncated { stages } => schedule.tail_sum(stages),
            AlphaSum::Exact => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsedExpectation {
    pub value_seconds: f64,
    /// `Σ_n Σ_m p_mn p_n T_n`.
    pub direct_term: f64,
    /// `Σ_x Σ_n Σ_m α_x p_mn² T_n`.
    pub extension_term: f64,
    pub alpha_sum: AlphaSum,
    /// Exact size of the omitted part of the `α` series times its weight.
    pub truncation_bound: f64,
}

/// Per-platform ingredients of the closed form.
struct CollapsedTerms {
    platform: PlatformId,
    landing: f64,
    hop_mass: f64,
    hop_square: f64,
    dwell: f64,
}

fn collapsed_terms(landscape: &Landscape, start: &StartPair) -> Result<Vec<CollapsedTerms>> {
    let landing = landing_distribution(landscape, &start.personality, &start.platform)?;
    landing
        .into_iter()
        .map(|(platform, p_n)| {
            let hop = hop_distribution(landscape, &platform, &start.personality)?;
            let dwell = landscape.require_platform(&platform)?.dwell_time;
            Ok(CollapsedTerms {
                landing: p_n,
                hop_mass: hop.hop_mass(),
                hop_square: hop.hops.values().map(|p| p * p).sum(),
                dwell,
                platform,
            })
        })
        .collect()
}

/// The closed-form expected trip time, evaluated as printed.
///
/// Pool dwell multipliers do not enter this form.
pub fn expected_time_collapsed(
    landscape: &Landscape,
    start: &StartPair,
    alpha_sum: AlphaSum,
) -> Result<CollapsedExpectation> {
    let terms = collapsed_terms(landscape, start)?;
    let direct_term: f64 = terms.iter().map(|t| t.hop_mass * t.landing * t.dwell).sum();
    let squares: f64 = terms.iter().map(|t| t.hop_square * t.dwell).sum();
    let extension_term = alpha_sum.evaluate(&landscape.schedule) * squares;
    Ok(CollapsedExpectation {
        value_seconds: direct_term + extension_term,
        direct_term,
        extension_term,
        alpha_sum,
        truncation_bound: alpha_sum.omitted(&landscape.schedule) * squares,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorComparison {
    pub recursive: ExpectationResult,
    pub collapsed: CollapsedExpectation,
    /// `recursive − collapsed`.
    pub divergence: f64,
}

/// Both evaluators side by side. The closed form sums `α_1..α_cutoff`.
pub fn compare_evaluators(
    landscape: &Landscape,
    start: &StartPair,
    depth_cutoff: u32,
) -> Result<EvaluatorComparison> {
    let recursive = expected_time_recursive(landscape, start, depth_cutoff)?;
    let collapsed = expected_time_collapsed(landscape, start, AlphaSum::Truncated { stages: depth_cutoff })?;
    Ok(EvaluatorComparison {
        divergence: recursive.value_seconds - collapsed.value_seconds,
        recursive,
        collapsed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityMethod {
    Analytic,
    FiniteDifference,
}

/// Why a sensitivity is not guaranteed positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SensitivityNote {
    /// The start pair never lands on the platform (`p_i = 0`).
    ZeroLandingProbability,
    /// No personality on the platform can be hopped to (`p_mi = 0` for all m).
    NoHopProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub platform_id: PlatformId,
    /// `∂T̄/∂T_i`, seconds of trip per second of dwell.
    pub derivative: f64,
    pub method: SensitivityMethod,
    /// Empty when the strict-positivity precondition holds.
    pub notes: Vec<SensitivityNote>,
}

/// Analytic derivative of [`expected_time_collapsed`] with respect to the
/// dwell time of `platform`: `Σ_m p_i p_mi + Σ_x α_x Σ_m p_mi²`.
pub fn marginal_sensitivity(
    landscape: &Landscape,
    start: &StartPair,
    platform: &PlatformId,
    alpha_sum: AlphaSum,
) -> Result<SensitivityResult> {
    landscape.require_platform(platform)?;
    let terms = collapsed_terms(landscape, start)?;
    let hop = hop_distribution(landscape, platform, &start.personality)?;
    let (derivative, landing) = match terms.iter().find(|t| &t.platform == platform) {
        Some(t) => (
            t.landing * t.hop_mass + alpha_sum.evaluate(&landscape.schedule) * t.hop_square,
            t.landing,
        ),
        None => (0.0, 0.0),
    };
    let mut notes = Vec::new();
    if landing <= 0.0 {
        notes.push(SensitivityNote::ZeroLandingProbability);
    }
    if !hop.hops.values().any(|&p| p > 0.0) {
        notes.push(SensitivityNote::NoHopProbability);
    }
    Ok(SensitivityResult {
        platform_id: platform.clone(),
        derivative,
        method: SensitivityMethod::Analytic,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evaluator {
    Recursive { depth_cutoff: u32 },
    Collapsed { alpha_sum: AlphaSum },
}

impl Evaluator {
    pub fn evaluate(&self, landscape: &Landscape, start: &StartPair) -> Result<f64> {
        match *self {
            Evaluator::Recursive { depth_cutoff } => {
                expected_time_recursive(landscape, start, depth_cutoff).map(|r| r.value_seconds)
            }
            Evaluator::Collapsed { alpha_sum } => {
                expected_time_collapsed(landscape, start, alpha_sum).map(|r| r.value_seconds)
            }
        }
    }
}

/// Central difference `(E(T_i + h) − E(T_i − h)) / 2h` of `evaluator`.
pub fn finite_difference_sensitivity(
    landscape: &Landscape,
    start: &StartPair,
    platform: &PlatformId,
    step_seconds: f64,
    evaluator: Evaluator,
) -> Result<SensitivityResult> {
    if !(step_seconds > 0.0 && step_seconds.is_finite()) {
        return Err(Error::InvalidStep(step_seconds));
    }
    let dwell = landscape.require_platform(platform)?.dwell_time;
    let up = evaluator.evaluate(&landscape.with_dwell_time(platform, dwell + step_seconds)?, start)?;
    let down = evaluator.evaluate(&landscape.with_dwell_time(platform, dwell - step_seconds)?, start)?;
    Ok(SensitivityResult {
        platform_id: platform.clone(),
        derivative: (up - down) / (2.0 * step_seconds),
        method: SensitivityMethod::FiniteDifference,
        notes: Vec::new(),
    })
}
