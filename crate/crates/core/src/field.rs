//! Index-based view of a [`Landscape`] with every choice distribution
//! precomputed. Used by the sampler and the recursive evaluator.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::landscape::{ContinuationSchedule, Landscape, StartPair};

#[derive(Debug, Clone)]
pub(crate) enum Landing {
    /// `(platform, probability)` over presence minus origin, in presence order.
    Ok(Vec<(usize, f64)>),
    NotPresent,
    NoAlternative,
}

#[derive(Debug, Clone)]
pub(crate) struct Hops {
    /// `(personality, probability)` over positive-weight candidates, in
    /// landscape order.
    pub targets: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Field {
    pub n_platforms: usize,
    pub n_personalities: usize,
    pub dwell: Vec<f64>,
    /// Indexed by `personality * n_platforms + origin`.
    landing: Vec<Landing>,
    /// Indexed by `platform * n_personalities + excluded personality`.
    hops: Vec<Hops>,
    /// `(pick_probability, dwell_multiplier)` of each personality's enabled pool.
    pub pools: Vec<Option<(f64, f64)>>,
    pub schedule: ContinuationSchedule,
}

impl Field {
    pub fn new(landscape: &Landscape) -> Result<Self> {
        let n_platforms = landscape.platforms.len();
        let n_personalities = landscape.personalities.len();
        let platform_index = |id: &crate::landscape::PlatformId| {
            landscape
                .platforms
                .iter()
                .position(|p| &p.id == id)
                .ok_or_else(|| Error::UnknownPlatform(id.clone()))
        };

        let mut presence = Vec::with_capacity(n_personalities);
        for person in &landscape.personalities {
            let idx = person
                .presence
                .iter()
                .map(platform_index)
                .collect::<Result<Vec<_>>>()?;
            presence.push(idx);
        }

        let mut landing = Vec::with_capacity(n_personalities * n_platforms);
        for pages in &presence {
            for origin in 0..n_platforms {
                if !pages.contains(&origin) {
                    landing.push(Landing::NotPresent);
                    continue;
                }
                let alts: Vec<usize> = pages.iter().copied().filter(|&n| n != origin).collect();
                let total: f64 = alts.iter().map(|&n| landscape.platforms[n].traffic_weight).sum();
                if alts.is_empty() || total <= 0.0 || !total.is_finite() {
                    landing.push(Landing::NoAlternative);
                } else {
                    landing.push(Landing::Ok(
                        alts.iter()
                            .map(|&n| (n, landscape.platforms[n].traffic_weight / total))
                            .collect(),
                    ));
                }
            }
        }

        let mut hops = Vec::with_capacity(n_platforms * n_personalities);
        for (n, platform) in landscape.platforms.iter().enumerate() {
            let candidates: Vec<(usize, f64)> = landscape
                .personalities
                .iter()
                .enumerate()
                .filter(|(m, _)| presence[*m].contains(&n))
                .map(|(m, p)| (m, p.attraction_on(&platform.id)))
                .collect();
            for excluded in 0..n_personalities {
                let denominator = landscape.return_weight
                    + candidates
                        .iter()
                        .filter(|(m, _)| *m != excluded)
                        .map(|(_, w)| w)
                        .sum::<f64>();
                let targets = candidates
                    .iter()
                    .filter(|(m, w)| *m != excluded && *w > 0.0)
                    .map(|&(m, w)| (m, w / denominator))
                    .collect();
                hops.push(Hops { targets });
            }
        }

        Ok(Field {
            n_platforms,
            n_personalities,
            dwell: landscape.platforms.iter().map(|p| p.dwell_time).collect(),
            landing,
            hops,
            pools: landscape
                .personalities
                .iter()
                .map(|p| p.active_pool().map(|pool| (pool.pick_probability, pool.dwell_multiplier)))
                .collect(),
            schedule: landscape.schedule.clone(),
        })
    }

    pub fn landing(&self, personality: usize, origin: usize) -> &Landing {
        &self.landing[personality * self.n_platforms + origin]
    }

    pub fn hops(&self, platform: usize, excluded: usize) -> &Hops {
        &self.hops[platform * self.n_personalities + excluded]
    }

    /// Resolves a start pair to indices, checking that it has somewhere to go.
    pub fn start(landscape: &Landscape, start: &StartPair) -> Result<(usize, usize)> {
        landscape.check_start(start)?;
        let m = landscape
            .personalities
            .iter()
            .position(|p| p.id == start.personality)
            .ok_or_else(|| Error::UnknownPersonality(start.personality.clone()))?;
        let s = landscape
            .platforms
            .iter()
            .position(|p| p.id == start.platform)
            .ok_or_else(|| Error::UnknownPlatform(start.platform.clone()))?;
        Ok((m, s))
    }

    /// Largest dwell a single stage can accrue, including pool boosts.
    pub fn max_stage_dwell(&self) -> f64 {
        let max_dwell = self.dwell.iter().copied().fold(0.0, f64::max);
        let max_mult = self
            .pools
            .iter()
            .flatten()
            .map(|&(_, mult)| mult)
            .fold(1.0, f64::max);
        max_dwell * max_mult
    }
}
