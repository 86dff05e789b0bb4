//! Trip sampling and Monte Carlo aggregation.
//!
//! A trip is a sequence of stages. Each stage consumes uniform draws in this
//! fixed order:
//!
//! 1. pool or direct link, only if the current personality has an enabled
//!    pool (`u < pick_probability` opens the pool);
//! 2. landing platform, by inverse CDF over the landing distribution in the
//!    personality's presence order (pool landings use the same distribution);
//! 3. no draw: the stage accrues the platform's dwell time, times the pool
//!    dwell multiplier for pool landings;
//! 4. hop or return, by inverse CDF over the positive-weight candidates in
//!    landscape order followed by the return bucket;
//! 5. after a hop at stage `x`: if `x` exceeds the depth cutoff the trip ends
//!    with [`TerminalReason::DepthCutoff`] without drawing; otherwise the
//!    trip continues when `u < α_x` and ends with
//!    [`TerminalReason::ContinuationFailed`] when not.
//!
//! A continued trip restarts at step 1 from the hopped-to personality, with
//! the current platform as origin. If that personality has no alternative
//! platform the trip ends with [`TerminalReason::ReturnedAndQuit`].
//!
//! Batches are split into fixed chunks of [`CHUNK_TRIPS`] trips. Each chunk
//! is tallied in trip order and the chunk tallies are merged in chunk order,
//! so a report does not depend on how many threads computed the chunks.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Landing};
use crate::landscape::{Landscape, PersonalityId, PlatformId, StartPair};
use crate::rng;

/// Default maximum number of extensions per trip.
pub const DEFAULT_DEPTH_CUTOFF: u32 = 64;

/// Trips per aggregation chunk.
pub const CHUNK_TRIPS: u64 = 4096;

/// Stream tag for the pool-enabled half of a pool comparison.
const POOL_STREAM: u64 = 0x504F_4F4C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalReason {
    ReturnedAndQuit,
    ContinuationFailed,
    DepthCutoff,
}

impl TerminalReason {
    fn index(self) -> usize {
        match self {
            TerminalReason::ReturnedAndQuit => 0,
            TerminalReason::ContinuationFailed => 1,
            TerminalReason::DepthCutoff => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage_index: u32,
    pub personality_id: PersonalityId,
    pub platform_id: PlatformId,
    pub dwell_seconds: f64,
    pub via_pool: bool,
    pub hop_target: Option<PersonalityId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub seed: u64,
    pub stages: Vec<StageRecord>,
    pub terminal_reason: TerminalReason,
}

impl TripRecord {
    pub fn total_time(&self) -> f64 {
        self.stages.iter().map(|s| s.dwell_seconds).sum()
    }
}

/// One stage in index form.
#[derive(Debug, Clone, Copy)]
struct Stage {
    personality: usize,
    platform: usize,
    dwell: f64,
    via_pool: bool,
    hop: Option<usize>,
}

/// Inverse-CDF pick over `(item, probability)` pairs. Returns `None` when `u`
/// falls past the listed mass.
fn pick(items: &[(usize, f64)], u: f64) -> Option<usize> {
    let mut cumulative = 0.0;
    for &(item, p) in items {
        cumulative += p;
        if u < cumulative {
            return Some(item);
        }
    }
    None
}

fn walk<R: RngCore>(
    field: &Field,
    start: (usize, usize),
    depth_cutoff: u32,
    rng: &mut R,
    mut on_stage: impl FnMut(&Stage),
) -> TerminalReason {
    let (mut personality, mut origin) = start;
    let mut stage_index = 1u32;
    loop {
        let landing = match field.landing(personality, origin) {
            Landing::Ok(d) => d,
            Landing::NotPresent | Landing::NoAlternative => return TerminalReason::ReturnedAndQuit,
        };
        let pool = field.pools[personality];
        let via_pool = match pool {
            Some((pick_probability, _)) => rng::uniform(rng) < pick_probability,
            None => false,
        };
        let u = rng::uniform(rng);
        // Rounding can leave u just past the summed mass; take the last
        // platform with positive probability.
        let platform = pick(landing, u).unwrap_or_else(|| {
            landing
                .iter()
                .rev()
                .find(|(_, p)| *p > 0.0)
                .map(|&(n, _)| n)
                .expect("landing distribution has positive mass")
        });
        let multiplier = match pool {
            Some((_, mult)) if via_pool => mult,
            _ => 1.0,
        };
        let hop = pick(&field.hops(platform, personality).targets, rng::uniform(rng));
        on_stage(&Stage {
            personality,
            platform,
            dwell: field.dwell[platform] * multiplier,
            via_pool,
            hop,
        });
        let Some(next) = hop else {
            return TerminalReason::ReturnedAndQuit;
        };
        if stage_index > depth_cutoff {
            return TerminalReason::DepthCutoff;
        }
        if rng::uniform(rng) >= field.schedule.alpha(stage_index) {
            return TerminalReason::ContinuationFailed;
        }
        personality = next;
        origin = platform;
        stage_index += 1;
    }
}

/// Samples one trip. The record is fully determined by the arguments.
pub fn sample_trip(
    landscape: &Landscape,
    start: &StartPair,
    seed: u64,
    depth_cutoff: u32,
) -> Result<TripRecord> {
    let field = Field::new(landscape)?;
    let start_idx = Field::start(landscape, start)?;
    Ok(sample_with_field(landscape, &field, start_idx, seed, depth_cutoff))
}

fn sample_with_field(
    landscape: &Landscape,
    field: &Field,
    start: (usize, usize),
    seed: u64,
    depth_cutoff: u32,
) -> TripRecord {
    let mut rng = rng::trip_rng(seed);
    let mut stages = Vec::new();
    let terminal_reason = walk(field, start, depth_cutoff, &mut rng, |s| {
        stages.push(StageRecord {
            stage_index: stages.len() as u32 + 1,
            personality_id: landscape.personalities[s.personality].id.clone(),
            platform_id: landscape.platforms[s.platform].id.clone(),
            dwell_seconds: s.dwell,
            via_pool: s.via_pool,
            hop_target: s.hop.map(|m| landscape.personalities[m].id.clone()),
        })
    });
    TripRecord {
        seed,
        stages,
        terminal_reason,
    }
}

/// Running sums for a batch of trips. Landing counts are integers so they
/// merge exactly; trip times use Welford accumulation merged pairwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficTally {
    trips: u64,
    mean: f64,
    m2: f64,
    landings: Vec<u64>,
    landings_sq: Vec<u64>,
    landings_cross: Vec<u64>,
    seconds: Vec<f64>,
    total_landings: u64,
    total_landings_sq: u64,
    terminals: [u64; 3],
    max_stages: u32,
}

impl TrafficTally {
    pub fn new(n_platforms: usize) -> Self {
        Self {
            trips: 0,
            mean: 0.0,
            m2: 0.0,
            landings: vec![0; n_platforms],
            landings_sq: vec![0; n_platforms],
            landings_cross: vec![0; n_platforms],
            seconds: vec![0.0; n_platforms],
            total_landings: 0,
            total_landings_sq: 0,
            terminals: [0; 3],
            max_stages: 0,
        }
    }

    fn add_trip(&mut self, per_platform: &[u64], seconds: &[f64], total: f64, terminal: TerminalReason) {
        self.trips += 1;
        let delta = total - self.mean;
        self.mean += delta / self.trips as f64;
        self.m2 += delta * (total - self.mean);

        let trip_landings: u64 = per_platform.iter().sum();
        for (n, &count) in per_platform.iter().enumerate() {
            self.landings[n] += count;
            self.landings_sq[n] += count * count;
            self.landings_cross[n] += count * trip_landings;
            self.seconds[n] += seconds[n];
        }
        self.total_landings += trip_landings;
        self.total_landings_sq += trip_landings * trip_landings;
        self.terminals[terminal.index()] += 1;
        self.max_stages = self.max_stages.max(trip_landings as u32);
    }

    /// Folds `other` (the later chunk) into `self`.
    pub fn merge(&mut self, other: &TrafficTally) {
        if other.trips == 0 {
            return;
        }
        if self.trips == 0 {
            *self = other.clone();
            return;
        }
        let n_a = self.trips as f64;
        let n_b = other.trips as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * n_b / n;
        self.m2 += other.m2 + delta * delta * n_a * n_b / n;
        self.trips += other.trips;
        for n in 0..self.landings.len() {
            self.landings[n] += other.landings[n];
            self.landings_sq[n] += other.landings_sq[n];
            self.landings_cross[n] += other.landings_cross[n];
            self.seconds[n] += other.seconds[n];
        }
        self.total_landings += other.total_landings;
        self.total_landings_sq += other.total_landings_sq;
        for i in 0..3 {
            self.terminals[i] += other.terminals[i];
        }
        self.max_stages = self.max_stages.max(other.max_stages);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformTraffic {
    pub platform_id: PlatformId,
    pub landings: u64,
    pub total_seconds: f64,
    pub share_of_landings: f64,
    /// Delta-method standard error of `share_of_landings`.
    pub share_standard_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalCounts {
    pub returned_and_quit: u64,
    pub continuation_failed: u64,
    pub depth_cutoff: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficReport {
    pub schema_version: u32,
    pub generator: alloc::string::String,
    pub master_seed: u64,
    pub depth_cutoff: u32,
    pub trips: u64,
    pub mean_trip_seconds: f64,
    /// Sample standard deviation of trip time over `sqrt(trips)`.
    pub standard_error: f64,
    pub platforms: Vec<PlatformTraffic>,
    pub terminals: TerminalCounts,
    pub max_stages: u32,
}

impl TrafficReport {
    pub fn platform(&self, id: &str) -> Option<&PlatformTraffic> {
        self.platforms.iter().find(|p| p.platform_id.as_str() == id)
    }
}

/// A batch of trips ready to be computed chunk by chunk.
#[derive(Debug, Clone)]
pub struct MonteCarloPlan {
    landscape: Landscape,
    field: Field,
    start: (usize, usize),
    n_trips: u64,
    master_seed: u64,
    depth_cutoff: u32,
}

impl MonteCarloPlan {
    pub fn new(
        landscape: &Landscape,
        start: &StartPair,
        n_trips: u64,
        master_seed: u64,
        depth_cutoff: u32,
    ) -> Result<Self> {
        if n_trips == 0 {
            return Err(Error::InvalidTripCount);
        }
        let field = Field::new(landscape)?;
        let start = Field::start(landscape, start)?;
        Ok(Self {
            landscape: landscape.clone(),
            field,
            start,
            n_trips,
            master_seed,
            depth_cutoff,
        })
    }

    pub fn chunk_count(&self) -> u64 {
        self.n_trips.div_ceil(CHUNK_TRIPS)
    }

    /// Tally of the trips in chunk `chunk`, sampled in trip order.
    pub fn run_chunk(&self, chunk: u64) -> TrafficTally {
        let n_platforms = self.field.n_platforms;
        let mut tally = TrafficTally::new(n_platforms);
        let mut counts = vec![0u64; n_platforms];
        let mut seconds = vec![0.0f64; n_platforms];
        let first = chunk * CHUNK_TRIPS;
        let last = (first + CHUNK_TRIPS).min(self.n_trips);
        for index in first..last {
            counts.iter_mut().for_each(|c| *c = 0);
            seconds.iter_mut().for_each(|s| *s = 0.0);
            let mut total = 0.0;
            let mut rng = rng::trip_rng(rng::trip_seed(self.master_seed, index));
            let terminal = walk(&self.field, self.start, self.depth_cutoff, &mut rng, |s| {
                counts[s.platform] += 1;
                seconds[s.platform] += s.dwell;
                total += s.dwell;
            });
            tally.add_trip(&counts, &seconds, total, terminal);
        }
        tally
    }

    /// Merges chunk tallies, which must be given in chunk order.
    pub fn finish<'a>(&self, chunks: impl IntoIterator<Item = &'a TrafficTally>) -> TrafficReport {
        let mut tally = TrafficTally::new(self.field.n_platforms);
        for chunk in chunks {
            tally.merge(chunk);
        }
        self.report(&tally)
    }

    /// The sampled record of trip `index`, for tracing.
    pub fn trace_trip(&self, index: u64) -> TripRecord {
        sample_with_field(
            &self.landscape,
            &self.field,
            self.start,
            rng::trip_seed(self.master_seed, index),
            self.depth_cutoff,
        )
    }

    pub fn n_trips(&self) -> u64 {
        self.n_trips
    }

    fn report(&self, t: &TrafficTally) -> TrafficReport {
        let n = t.trips as f64;
        let standard_error = if t.trips > 1 {
            libm::sqrt(t.m2 / (n - 1.0)) / libm::sqrt(n)
        } else {
            0.0
        };
        let total_landings = t.total_landings as f64;
        let mean_x = total_landings / n;
        let platforms = self
            .landscape
            .platforms
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let share = if t.total_landings > 0 {
                    t.landings[i] as f64 / total_landings
                } else {
                    0.0
                };
                // Ratio estimator Y/X with Y the platform's landings per trip
                // and X all landings per trip.
                let share_standard_error = if t.trips > 1 && mean_x > 0.0 {
                    let residual = t.landings_sq[i] as f64 - 2.0 * share * t.landings_cross[i] as f64
                        + share * share * t.total_landings_sq as f64;
                    libm::sqrt((residual / (n - 1.0)).max(0.0) / n) / mean_x
                } else {
                    0.0
                };
                PlatformTraffic {
                    platform_id: p.id.clone(),
                    landings: t.landings[i],
                    total_seconds: t.seconds[i],
                    share_of_landings: share,
                    share_standard_error,
                }
            })
            .collect();
        TrafficReport {
            schema_version: crate::SCHEMA_VERSION,
            generator: rng::GENERATOR.into(),
            master_seed: self.master_seed,
            depth_cutoff: self.depth_cutoff,
            trips: t.trips,
            mean_trip_seconds: t.mean,
            standard_error,
            platforms,
            terminals: TerminalCounts {
                returned_and_quit: t.terminals[0],
                continuation_failed: t.terminals[1],
                depth_cutoff: t.terminals[2],
            },
            max_stages: t.max_stages,
        }
    }
}

/// Serial Monte Carlo estimate of expected trip time and per-platform
/// traffic.
pub fn run_monte_carlo(
    landscape: &Landscape,
    start: &StartPair,
    n_trips: u64,
    master_seed: u64,
    depth_cutoff: u32,
) -> Result<TrafficReport> {
    let plan = MonteCarloPlan::new(landscape, start, n_trips, master_seed, depth_cutoff)?;
    let chunks: Vec<TrafficTally> = (0..plan.chunk_count()).map(|c| plan.run_chunk(c)).collect();
    Ok(plan.finish(&chunks))
}

/// Paired batches for comparing a landscape with its pools off and on.
///
/// The pools-off batch uses `master_seed`; the pools-on batch uses an
/// independent stream derived from it.
#[derive(Debug, Clone)]
pub struct PoolComparisonPlan {
    pub disabled: MonteCarloPlan,
    pub enabled: MonteCarloPlan,
}

impl PoolComparisonPlan {
    pub fn new(
        landscape: &Landscape,
        start: &StartPair,
        n_trips: u64,
        master_seed: u64,
        depth_cutoff: u32,
    ) -> Result<Self> {
        if !landscape.has_enabled_pool() {
            return Err(Error::NoPoolConfigured);
        }
        Ok(Self {
            disabled: MonteCarloPlan::new(
                &landscape.with_pools_disabled(),
                start,
                n_trips,
                master_seed,
                depth_cutoff,
            )?,
            enabled: MonteCarloPlan::new(
                landscape,
                start,
                n_trips,
                rng::stream_seed(master_seed, POOL_STREAM),
                depth_cutoff,
            )?,
        })
    }
}

/// Returns `(pools disabled, pools enabled)` reports.
pub fn run_pool_comparison(
    landscape: &Landscape,
    start: &StartPair,
    n_trips: u64,
    master_seed: u64,
    depth_cutoff: u32,
) -> Result<(TrafficReport, TrafficReport)> {
    let plan = PoolComparisonPlan::new(landscape, start, n_trips, master_seed, depth_cutoff)?;
    let run = |p: &MonteCarloPlan| {
        let chunks: Vec<TrafficTally> = (0..p.chunk_count()).map(|c| p.run_chunk(c)).collect();
        p.finish(&chunks)
    };
    Ok((run(&plan.disabled), run(&plan.enabled)))
}
