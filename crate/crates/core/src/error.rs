use crate::landscape::{PersonalityId, PlatformId};
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown platform `{0}`")]
    UnknownPlatform(PlatformId),
    #[error("unknown personality `{0}`")]
    UnknownPersonality(PersonalityId),
    #[error("personality `{personality}` has no page on platform `{platform}`")]
    NotPresent {
        personality: PersonalityId,
        platform: PlatformId,
    },
    #[error("personality `{personality}` has no alternative platform to `{origin}` with positive traffic")]
    NoAlternativePlatform {
        personality: PersonalityId,
        origin: PlatformId,
    },
    #[error("trip count must be at least 1")]
    InvalidTripCount,
    #[error("no personality has an enabled content pool")]
    NoPoolConfigured,
    #[error("enumeration exceeds {limit} paths")]
    InstanceTooLarge { limit: usize },
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("usage dataset is empty")]
    EmptyDataset,
    #[error("row `{platform}`: {field} must be positive, got {value}")]
    NonPositiveValue {
        platform: String,
        field: &'static str,
        value: f64,
    },
    #[error("cpc and cpm must be positive (cpc={cpc}, cpm={cpm})")]
    InvalidRevenueParams { cpc: f64, cpm: f64 },
    #[error("media length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("learning rate {0} is outside the allowed range")]
    InvalidLearningRate(f64),
    #[error("at least one engagement profile is required")]
    EmptyProfiles,
    #[error("search interval [{lo}, {hi}] with resolution {resolution} is degenerate")]
    DegenerateInterval { lo: f64, hi: f64, resolution: f64 },
    #[error("search interval [{lo}, {hi}] does not cover preferred length {preferred}")]
    IntervalExcludesPeak { lo: f64, hi: f64, preferred: f64 },
    #[error("invalid engagement profile `{0}`")]
    InvalidProfile(String),
}
