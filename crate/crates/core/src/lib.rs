#![no_std]

//! Cross-platform social media trips modeled as insect pollination.
//!
//! A user on a personality's page opens a pass-through ("pollinator") app,
//! lands on one of that personality's pages on another platform, spends the
//! platform's dwell time there, and then either hops to another personality
//! on the same platform or returns and quits. Each hop extends the trip one
//! more stage with a strictly decreasing probability.
//!
//! The crate is `no_std` with `alloc`. It contains:
//!
//! - [`landscape`]: platforms, personalities, choice probabilities, schedule,
//!   and validation diagnostics.
//! - [`trip`]: the seeded trip sampler and chunked Monte Carlo aggregation.
//! - [`expectation`]: exact expected trip time (operational recursion and the
//!   collapsed closed form), a brute-force path enumerator, and sensitivities.
//! - [`revenue`]: CPC/CPM weekly index revenue and per-pollination uplift.
//! - [`heterogeneity`]: two-type media-length engagement and exposure-driven
//!   preference convergence.
//!
//! File formats, the CLI, and the multi-threaded runner live in the
//! `pollinator` crate.

extern crate alloc;

pub mod error;
pub mod expectation;
pub mod heterogeneity;
pub mod landscape;
pub mod revenue;
pub mod rng;
pub mod trip;

mod field;

pub use error::{Error, Result};
pub use landscape::{
    ContinuationSchedule, Landscape, OsmPlatform, Personality, PersonalityId, PlatformId,
    PoolConfig, StartPair,
};

/// Version tag written into every serialized report.
pub const SCHEMA_VERSION: u32 = 1;
