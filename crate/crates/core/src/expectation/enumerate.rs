//! Exhaustive enumeration of trips.
//!
//! Walks every branch of the trip tree (pool choice, landing platform, hop
//! or return, continuation) using only the public distribution functions of
//! [`crate::landscape`], and records each complete path with its probability
//! and total time. Zero-probability branches are pruned.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{truncation_bound, ExpectationResult};
use crate::error::{Error, Result};
use crate::landscape::{
    continuation_probability, hop_distribution, landing_distribution, Landscape, PersonalityId,
    PlatformId, StartPair,
};
use crate::trip::{StageRecord, TerminalReason};

/// Default cap on the number of enumerated paths.
pub const DEFAULT_PATH_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedPath {
    pub stages: Vec<StageRecord>,
    pub probability: f64,
    pub seconds: f64,
    pub terminal_reason: TerminalReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub expectation: ExpectationResult,
    pub paths: Vec<EnumeratedPath>,
}

impl Enumeration {
    pub fn total_probability(&self) -> f64 {
        self.paths.iter().map(|p| p.probability).sum()
    }
}

struct Walker<'a> {
    landscape: &'a Landscape,
    depth_cutoff: u32,
    limit: usize,
    paths: Vec<EnumeratedPath>,
}

impl Walker<'_> {
    fn emit(&mut self, stages: &[StageRecord], probability: f64, terminal_reason: TerminalReason) -> Result<()> {
        if self.paths.len() >= self.limit {
            return Err(Error::InstanceTooLarge { limit: self.limit });
        }
        self.paths.push(EnumeratedPath {
            stages: stages.to_vec(),
            probability,
            seconds: stages.iter().map(|s| s.dwell_seconds).sum(),
            terminal_reason,
        });
        Ok(())
    }

    fn expand(
        &mut self,
        personality: &PersonalityId,
        origin: &PlatformId,
        stage_index: u32,
        prefix: &mut Vec<StageRecord>,
        probability: f64,
    ) -> Result<()> {
        let landing = match landing_distribution(self.landscape, personality, origin) {
            Ok(d) => d,
            Err(Error::NoAlternativePlatform { .. }) | Err(Error::NotPresent { .. }) if stage_index > 1 => {
                return self.emit(prefix, probability, TerminalReason::ReturnedAndQuit);
            }
            Err(e) => return Err(e),
        };
        let person = self.landscape.require_personality(personality)?;
        let mut routes = Vec::new();
        match person.active_pool() {
            Some(pool) => {
                routes.push((true, pool.pick_probability, pool.dwell_multiplier));
                routes.push((false, 1.0 - pool.pick_probability, 1.0));
            }
            None => routes.push((false, 1.0, 1.0)),
        }

        for (via_pool, p_route, multiplier) in routes {
            if p_route <= 0.0 {
                continue;
            }
            for (platform, p_land) in &landing {
                if *p_land <= 0.0 {
                    continue;
                }
                let dwell = self.landscape.require_platform(platform)?.dwell_time * multiplier;
                let reach = probability * p_route * p_land;
                let hop = hop_distribution(self.landscape, platform, personality)?;
                let mut stage = StageRecord {
                    stage_index,
                    personality_id: personality.clone(),
                    platform_id: platform.clone(),
                    dwell_seconds: dwell,
                    via_pool,
                    hop_target: None,
                };

                if hop.return_probability > 0.0 {
                    prefix.push(stage.clone());
                    let r = self.emit(prefix, reach * hop.return_probability, TerminalReason::ReturnedAndQuit);
                    prefix.pop();
                    r?;
                }
                for (target, p_hop) in &hop.hops {
                    if *p_hop <= 0.0 {
                        continue;
                    }
                    stage.hop_target = Some(target.clone());
                    prefix.push(stage.clone());
                    let hopped = reach * p_hop;
                    let r = if stage_index > self.depth_cutoff {
                        self.emit(prefix, hopped, TerminalReason::DepthCutoff)
                    } else {
                        let alpha = continuation_probability(&self.landscape.schedule, stage_index);
                        let mut r = Ok(());
                        if alpha < 1.0 {
                            r = self.emit(prefix, hopped * (1.0 - alpha), TerminalReason::ContinuationFailed);
                        }
                        if r.is_ok() && alpha > 0.0 {
                            r = self.expand(target, platform, stage_index + 1, prefix, hopped * alpha);
                        }
                        r
                    };
                    prefix.pop();
                    r?;
                }
            }
        }
        Ok(())
    }
}

/// Every trip path with at most `depth_cutoff` extensions, and the
/// probability-weighted expected time.
pub fn enumerate_trips(landscape: &Landscape, start: &StartPair, depth_cutoff: u32) -> Result<Enumeration> {
    enumerate_trips_with_limit(landscape, start, depth_cutoff, DEFAULT_PATH_LIMIT)
}

pub fn enumerate_trips_with_limit(
    landscape: &Landscape,
    start: &StartPair,
    depth_cutoff: u32,
    max_paths: usize,
) -> Result<Enumeration> {
    let mut walker = Walker {
        landscape,
        depth_cutoff,
        limit: max_paths,
        paths: Vec::new(),
    };
    walker.expand(&start.personality, &start.platform, 1, &mut Vec::new(), 1.0)?;
    let value_seconds = walker.paths.iter().map(|p| p.probability * p.seconds).sum();

    let max_dwell = landscape.platforms.iter().map(|p| p.dwell_time).fold(0.0, f64::max);
    let max_mult = landscape
        .personalities
        .iter()
        .filter_map(|p| p.active_pool())
        .map(|pool| pool.dwell_multiplier)
        .fold(1.0, f64::max);
    Ok(Enumeration {
        expectation: ExpectationResult {
            value_seconds,
            cutoff_used: depth_cutoff,
            truncation_bound: truncation_bound(&landscape.schedule, depth_cutoff, max_dwell * max_mult),
        },
        paths: walker.paths,
    })
}
