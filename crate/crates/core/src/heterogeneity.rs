//! Two user types with different preferred media lengths.
//!
//! Each type has an engagement curve over media length, peaking at its
//! preferred length. The median media length is the length that maximizes
//! the summed engagement of all types. Exposure to content pulls a type's
//! preferred length toward what it consumed, which homogenizes types that
//! share a pool.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grids larger than this are rejected as degenerate.
const MAX_GRID_POINTS: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementProfile {
    pub type_label: String,
    /// Peak of the engagement curve, in seconds.
    pub preferred_length: f64,
    /// Width of the engagement curve, in seconds.
    pub width: f64,
}

impl EngagementProfile {
    pub fn new(type_label: impl Into<String>, preferred_length: f64, width: f64) -> Self {
        Self {
            type_label: type_label.into(),
            preferred_length,
            width,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.preferred_length) && ok(self.width) {
            Ok(())
        } else {
            Err(Error::InvalidProfile(self.type_label.clone()))
        }
    }
}

/// Shape of an engagement curve as a function of `z = (L − μ) / σ`.
/// Must equal 1 at `z = 0` and be symmetric and non-increasing in `|z|`.
pub trait EngagementKernel {
    fn shape(&self, z: f64) -> f64;
}

/// `exp(−z²/2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gaussian;

impl EngagementKernel for Gaussian {
    fn shape(&self, z: f64) -> f64 {
        libm::exp(-0.5 * z * z)
    }
}

/// `max(0, 1 − |z|)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Triangular;

impl EngagementKernel for Triangular {
    fn shape(&self, z: f64) -> f64 {
        (1.0 - libm::fabs(z)).max(0.0)
    }
}

pub fn engagement_with<K: EngagementKernel + ?Sized>(
    kernel: &K,
    profile: &EngagementProfile,
    length_seconds: f64,
) -> Result<f64> {
    if !(length_seconds > 0.0 && length_seconds.is_finite()) {
        return Err(Error::NonPositiveLength(length_seconds));
    }
    profile.check()?;
    Ok(kernel.shape((length_seconds - profile.preferred_length) / profile.width))
}

/// Gaussian engagement `exp(−(L − μ)² / 2σ²)`.
pub fn engagement(profile: &EngagementProfile, length_seconds: f64) -> Result<f64> {
    engagement_with(&Gaussian, profile, length_seconds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianLengthResult {
    pub length: f64,
    pub joint_engagement: f64,
    pub grid_resolution: f64,
}

/// Grid search for the length maximizing summed Gaussian engagement.
pub fn median_media_length(
    profiles: &[EngagementProfile],
    search_interval: (f64, f64),
    grid_resolution: f64,
) -> Result<MedianLengthResult> {
    median_media_length_with(&Gaussian, profiles, search_interval, grid_resolution)
}

/// Grid search over `lo, lo + h, lo + 2h, …` plus `hi` itself. Ties go to
/// the smallest length.
pub fn median_media_length_with<K: EngagementKernel + ?Sized>(
    kernel: &K,
    profiles: &[EngagementProfile],
    search_interval: (f64, f64),
    grid_resolution: f64,
) -> Result<MedianLengthResult> {
    if profiles.is_empty() {
        return Err(Error::EmptyProfiles);
    }
    let (lo, hi) = search_interval;
    let degenerate = Error::DegenerateInterval {
        lo,
        hi,
        resolution: grid_resolution,
    };
    if !(lo > 0.0 && hi > lo && hi.is_finite() && grid_resolution > 0.0 && grid_resolution.is_finite()) {
        return Err(degenerate);
    }
    let steps = libm::floor((hi - lo) / grid_resolution);
    if steps > MAX_GRID_POINTS {
        return Err(degenerate);
    }
    for p in profiles {
        p.check()?;
        if !(lo..=hi).contains(&p.preferred_length) {
            return Err(Error::IntervalExcludesPeak {
                lo,
                hi,
                preferred: p.preferred_length,
            });
        }
    }

    let joint = |length: f64| -> f64 {
        profiles
            .iter()
            .map(|p| kernel.shape((length - p.preferred_length) / p.width))
            .sum()
    };
    let mut best = MedianLengthResult {
        length: lo,
        joint_engagement: joint(lo),
        grid_resolution,
    };
    let mut consider = |length: f64| {
        let value = joint(length);
        if value > best.joint_engagement {
            best.length = length;
            best.joint_engagement = value;
        }
    };
    let steps = steps as u64;
    for i in 1..=steps {
        consider(lo + i as f64 * grid_resolution);
    }
    if lo + steps as f64 * grid_resolution < hi {
        consider(hi);
    }
    Ok(best)
}

/// Moves the preferred length toward `consumed_length`:
/// `μ ← μ + η (L − μ)`.
pub fn exposure_update(
    profile: &EngagementProfile,
    consumed_length: f64,
    learning_rate: f64,
) -> Result<EngagementProfile> {
    if !(0.0..=1.0).contains(&learning_rate) {
        return Err(Error::InvalidLearningRate(learning_rate));
    }
    if !(consumed_length > 0.0 && consumed_length.is_finite()) {
        return Err(Error::NonPositiveLength(consumed_length));
    }
    Ok(EngagementProfile {
        preferred_length: profile.preferred_length + learning_rate * (consumed_length - profile.preferred_length),
        ..profile.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub step: u32,
    pub mu_a: f64,
    pub mu_b: f64,
    /// `|μ_A − μ_B|`.
    pub gap: f64,
}

/// Both types consume every pool item, in order, once per step.
///
/// Since both apply the same convex update toward the same item, the signed
/// difference `μ_B − μ_A` shrinks by exactly `(1 − η)` per item consumed.
/// The returned trajectory starts with the initial state at step 0.
pub fn convergence_sim(
    profile_a: &EngagementProfile,
    profile_b: &EngagementProfile,
    shared_pool_lengths: &[f64],
    learning_rate: f64,
    steps: u32,
) -> Result<Vec<TrajectoryPoint>> {
    if !(learning_rate > 0.0 && learning_rate < 1.0) {
        return Err(Error::InvalidLearningRate(learning_rate));
    }
    profile_a.check()?;
    profile_b.check()?;
    let point = |step, a: &EngagementProfile, b: &EngagementProfile| TrajectoryPoint {
        step,
        mu_a: a.preferred_length,
        mu_b: b.preferred_length,
        gap: libm::fabs(b.preferred_length - a.preferred_length),
    };
    let mut a = profile_a.clone();
    let mut b = profile_b.clone();
    let mut trajectory = Vec::with_capacity(steps as usize + 1);
    trajectory.push(point(0, &a, &b));
    for step in 1..=steps {
        for &length in shared_pool_lengths {
            a = exposure_update(&a, length, learning_rate)?;
            b = exposure_update(&b, length, learning_rate)?;
        }
        trajectory.push(point(step, &a, &b));
    }
    Ok(trajectory)
}
