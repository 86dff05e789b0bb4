//! The social media field: platforms, personalities, and the probability
//! model that routes a user between them.
//!
//! Landing on platform `n` from origin `s` happens with probability
//! proportional to `n`'s traffic weight, over the personality's other
//! platforms. On a platform, hopping to personality `m` happens with
//! probability `w_m / (w0 + Σ w)`, where the sum runs over the other
//! personalities on that platform and `w0` is the weight of returning to the
//! pollinator. The remainder `w0 / (w0 + Σ w)` is the return probability.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(String::from(s))
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Identifier of an online social media platform.
    PlatformId
);
string_id!(
    /// Identifier of a personality (public figure or content creator).
    PersonalityId
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsmPlatform {
    pub id: PlatformId,
    #[serde(default)]
    pub name: String,
    /// Relative traffic mass; landing probabilities are proportional to it.
    pub traffic_weight: f64,
    /// Average seconds spent per landing.
    pub dwell_time: f64,
}

/// A personality's curated pool of cross-platform links inside the
/// pollinator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub enabled: bool,
    /// Chance the user opens the pool instead of a direct platform link.
    pub pick_probability: f64,
    /// Dwell boost applied to pool-mediated landings.
    pub dwell_multiplier: f64,
}

impl PoolConfig {
    /// Expected dwell factor of one landing through this personality:
    /// `1 + ρ(λ − 1)`.
    pub fn expected_dwell_factor(&self) -> f64 {
        if self.enabled {
            1.0 + self.pick_probability * (self.dwell_multiplier - 1.0)
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Personality {
    pub id: PersonalityId,
    #[serde(default)]
    pub name: String,
    /// Platforms this personality has a page on, in the order they were
    /// declared.
    pub presence: Vec<PlatformId>,
    /// Hop attraction per platform. Missing platforms have weight zero.
    #[serde(default)]
    pub attraction: BTreeMap<PlatformId, f64>,
    #[serde(default)]
    pub pool: Option<PoolConfig>,
}

impl Personality {
    pub fn is_present_on(&self, platform: &PlatformId) -> bool {
        self.presence.contains(platform)
    }

    pub fn attraction_on(&self, platform: &PlatformId) -> f64 {
        self.attraction.get(platform).copied().unwrap_or(0.0)
    }

    /// The pool, if one is configured and enabled.
    pub fn active_pool(&self) -> Option<&PoolConfig> {
        self.pool.as_ref().filter(|p| p.enabled)
    }
}

/// Probability of extending a trip by one more stage after a hop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuationSchedule {
    /// `α_x = base^x`.
    Geometric { base: f64 },
    /// `α_x = values[x - 1]`, and zero past the end of the list.
    Explicit { values: Vec<f64> },
}

impl Default for ContinuationSchedule {
    fn default() -> Self {
        ContinuationSchedule::Geometric { base: 0.5 }
    }
}

impl ContinuationSchedule {
    /// `α_x` for stage `x ≥ 1`.
    ///
    /// # Panics
    ///
    /// Panics if `stage` is zero; stages are counted from one.
    pub fn alpha(&self, stage: u32) -> f64 {
        assert!(stage >= 1, "continuation stages start at 1");
        match self {
            ContinuationSchedule::Geometric { base } => libm::pow(*base, f64::from(stage)),
            ContinuationSchedule::Explicit { values } => {
                values.get(stage as usize - 1).copied().unwrap_or(0.0)
            }
        }
    }

    /// `Σ_{x=1}^{stages} α_x`.
    pub fn partial_sum(&self, stages: u32) -> f64 {
        (1..=stages).map(|x| self.alpha(x)).sum()
    }

    /// `Σ_{x=1}^{∞} α_x`. Geometric schedules use `a / (1 − a)`.
    pub fn total_sum(&self) -> f64 {
        match self {
            ContinuationSchedule::Geometric { base } => base / (1.0 - base),
            ContinuationSchedule::Explicit { values } => values.iter().sum(),
        }
    }

    /// `Σ_{x > stages} α_x`.
    pub fn tail_sum(&self, stages: u32) -> f64 {
        match self {
            ContinuationSchedule::Geometric { base } => {
                libm::pow(*base, f64::from(stages) + 1.0) / (1.0 - base)
            }
            ContinuationSchedule::Explicit { values } => {
                values.iter().skip(stages as usize).sum()
            }
        }
    }
}

/// `α_x` of `schedule` at stage `stage_x`. See [`ContinuationSchedule::alpha`].
pub fn continuation_probability(schedule: &ContinuationSchedule, stage_x: u32) -> f64 {
    schedule.alpha(stage_x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub platforms: Vec<OsmPlatform>,
    pub personalities: Vec<Personality>,
    /// Weight `w0` of the return-to-pollinator option.
    pub return_weight: f64,
    #[serde(default)]
    pub schedule: ContinuationSchedule,
}

/// Where a trip begins: the personality whose page the user is on, and the
/// platform that page lives on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartPair {
    pub personality: PersonalityId,
    pub platform: PlatformId,
}

impl StartPair {
    pub fn new(personality: impl Into<PersonalityId>, platform: impl Into<PlatformId>) -> Self {
        Self {
            personality: personality.into(),
            platform: platform.into(),
        }
    }
}

impl Landscape {
    pub fn platform(&self, id: &PlatformId) -> Option<&OsmPlatform> {
        self.platforms.iter().find(|p| &p.id == id)
    }

    pub fn personality(&self, id: &PersonalityId) -> Option<&Personality> {
        self.personalities.iter().find(|p| &p.id == id)
    }

    pub(crate) fn require_platform(&self, id: &PlatformId) -> Result<&OsmPlatform> {
        self.platform(id)
            .ok_or_else(|| Error::UnknownPlatform(id.clone()))
    }

    pub(crate) fn require_personality(&self, id: &PersonalityId) -> Result<&Personality> {
        self.personality(id)
            .ok_or_else(|| Error::UnknownPersonality(id.clone()))
    }

    /// Copy of this landscape with every pool switched off.
    pub fn with_pools_disabled(&self) -> Landscape {
        let mut out = self.clone();
        for p in &mut out.personalities {
            if let Some(pool) = p.pool.as_mut() {
                pool.enabled = false;
            }
        }
        out
    }

    /// Copy of this landscape with one platform's dwell time replaced.
    pub fn with_dwell_time(&self, platform: &PlatformId, seconds: f64) -> Result<Landscape> {
        let mut out = self.clone();
        let p = out
            .platforms
            .iter_mut()
            .find(|p| &p.id == platform)
            .ok_or_else(|| Error::UnknownPlatform(platform.clone()))?;
        p.dwell_time = seconds;
        Ok(out)
    }

    pub fn has_enabled_pool(&self) -> bool {
        self.personalities.iter().any(|p| p.active_pool().is_some())
    }

    /// Checks that `start` names a known personality with a page on a known
    /// platform and at least one alternative platform to land on.
    pub fn check_start(&self, start: &StartPair) -> Result<()> {
        landing_distribution(self, &start.personality, &start.platform).map(|_| ())
    }
}

/// Probability of the pollinator landing `personality`'s visitor on each of
/// its other platforms, starting from `origin`.
///
/// The support is the personality's presence minus `origin`; zero-traffic
/// platforms appear with probability zero.
pub fn landing_distribution(
    landscape: &Landscape,
    personality: &PersonalityId,
    origin: &PlatformId,
) -> Result<BTreeMap<PlatformId, f64>> {
    let person = landscape.require_personality(personality)?;
    landscape.require_platform(origin)?;
    if !person.is_present_on(origin) {
        return Err(Error::NotPresent {
            personality: personality.clone(),
            platform: origin.clone(),
        });
    }
    let mut weights = BTreeMap::new();
    for id in person.presence.iter().filter(|id| *id != origin) {
        let platform = landscape.require_platform(id)?;
        weights.insert(id.clone(), platform.traffic_weight);
    }
    let total: f64 = weights.values().sum();
    if weights.is_empty() || total <= 0.0 || !total.is_finite() {
        return Err(Error::NoAlternativePlatform {
            personality: personality.clone(),
            origin: origin.clone(),
        });
    }
    for w in weights.values_mut() {
        *w /= total;
    }
    Ok(weights)
}

/// Within-platform choice: hop to another personality or return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopDistribution {
    /// Hop probability per candidate personality (zero-weight candidates
    /// included with probability zero).
    pub hops: BTreeMap<PersonalityId, f64>,
    /// Probability of returning to the pollinator, `p0`.
    pub return_probability: f64,
}

impl HopDistribution {
    pub fn hop_mass(&self) -> f64 {
        self.hops.values().sum()
    }
}

/// Hop probabilities on `platform` for a user currently on
/// `exclude_personality`'s page there.
pub fn hop_distribution(
    landscape: &Landscape,
    platform: &PlatformId,
    exclude_personality: &PersonalityId,
) -> Result<HopDistribution> {
    landscape.require_platform(platform)?;
    let candidates: Vec<(&PersonalityId, f64)> = landscape
        .personalities
        .iter()
        .filter(|p| &p.id != exclude_personality && p.is_present_on(platform))
        .map(|p| (&p.id, p.attraction_on(platform)))
        .collect();
    let denominator = landscape.return_weight + candidates.iter().map(|(_, w)| w).sum::<f64>();
    Ok(HopDistribution {
        hops: candidates
            .into_iter()
            .map(|(id, w)| (id.clone(), w / denominator))
            .collect(),
        return_probability: landscape.return_weight / denominator,
    })
}

/// Machine-readable code of a landscape invariant violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagnosticCode {
    TooFewPlatforms,
    DuplicatePlatformId,
    DuplicatePersonalityId,
    NegativeTrafficWeight,
    NoPositiveTraffic,
    NonPositiveDwellTime,
    EmptyPresence,
    UnknownPresencePlatform,
    AttractionOutsidePresence,
    NegativeAttraction,
    InvalidPickProbability,
    InvalidDwellMultiplier,
    ZeroReturnWeight,
    InvalidScheduleBase,
    ScheduleValueOutOfRange,
    NonDecreasingSchedule,
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Every invariant violation in `landscape`, one diagnostic each. An empty
/// list means the landscape is well formed.
pub fn validate_landscape(landscape: &Landscape) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |code, message: String| out.push(Diagnostic { code, message });

    if landscape.platforms.len() < 2 {
        push(
            DiagnosticCode::TooFewPlatforms,
            format!("{} platform(s); at least 2 required", landscape.platforms.len()),
        );
    }
    let mut seen = BTreeSet::new();
    for p in &landscape.platforms {
        if !seen.insert(&p.id) {
            push(DiagnosticCode::DuplicatePlatformId, format!("platform `{}` declared twice", p.id));
        }
        if !(p.traffic_weight >= 0.0 && p.traffic_weight.is_finite()) {
            push(
                DiagnosticCode::NegativeTrafficWeight,
                format!("platform `{}` traffic_weight {}", p.id, p.traffic_weight),
            );
        }
        if !(p.dwell_time > 0.0 && p.dwell_time.is_finite()) {
            push(
                DiagnosticCode::NonPositiveDwellTime,
                format!("platform `{}` dwell_time {}", p.id, p.dwell_time),
            );
        }
    }
    if !landscape.platforms.is_empty() && !landscape.platforms.iter().any(|p| p.traffic_weight > 0.0) {
        push(DiagnosticCode::NoPositiveTraffic, String::from("no platform has positive traffic_weight"));
    }

    let mut seen = BTreeSet::new();
    for person in &landscape.personalities {
        if !seen.insert(&person.id) {
            push(
                DiagnosticCode::DuplicatePersonalityId,
                format!("personality `{}` declared twice", person.id),
            );
        }
        if person.presence.is_empty() {
            push(DiagnosticCode::EmptyPresence, format!("personality `{}` has no pages", person.id));
        }
        for id in &person.presence {
            if landscape.platform(id).is_none() {
                push(
                    DiagnosticCode::UnknownPresencePlatform,
                    format!("personality `{}` lists unknown platform `{}`", person.id, id),
                );
            }
        }
        for (id, w) in &person.attraction {
            if !person.is_present_on(id) {
                push(
                    DiagnosticCode::AttractionOutsidePresence,
                    format!("personality `{}` has attraction on `{}` without a page there", person.id, id),
                );
            }
            if !(*w >= 0.0 && w.is_finite()) {
                push(
                    DiagnosticCode::NegativeAttraction,
                    format!("personality `{}` attraction on `{}` is {}", person.id, id, w),
                );
            }
        }
        if let Some(pool) = &person.pool {
            if !(0.0..=1.0).contains(&pool.pick_probability) {
                push(
                    DiagnosticCode::InvalidPickProbability,
                    format!("personality `{}` pool pick_probability {}", person.id, pool.pick_probability),
                );
            }
            if !(pool.dwell_multiplier >= 1.0 && pool.dwell_multiplier.is_finite()) {
                push(
                    DiagnosticCode::InvalidDwellMultiplier,
                    format!("personality `{}` pool dwell_multiplier {}", person.id, pool.dwell_multiplier),
                );
            }
        }
    }

    if !(landscape.return_weight > 0.0 && landscape.return_weight.is_finite()) {
        push(
            DiagnosticCode::ZeroReturnWeight,
            format!("return_weight {} must be positive", landscape.return_weight),
        );
    }

    match &landscape.schedule {
        ContinuationSchedule::Geometric { base } => {
            if !(0.0..1.0).contains(base) {
                push(DiagnosticCode::InvalidScheduleBase, format!("geometric base {} not in [0, 1)", base));
            }
        }
        ContinuationSchedule::Explicit { values } => {
            for (i, v) in values.iter().enumerate() {
                if !(0.0..1.0).contains(v) {
                    push(
                        DiagnosticCode::ScheduleValueOutOfRange,
                        format!("alpha_{} = {} not in [0, 1)", i + 1, v),
                    );
                }
            }
            for (i, pair) in values.windows(2).enumerate() {
                if pair[1] > 0.0 && pair[1] >= pair[0] {
                    push(
                        DiagnosticCode::NonDecreasingSchedule,
                        format!("alpha_{} = {} is not below alpha_{} = {}", i + 2, pair[1], i + 1, pair[0]),
                    );
                }
            }
        }
    }
    out
}
