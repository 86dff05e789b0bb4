#![allow(dead_code)]

use std::collections::BTreeMap;

use pollinator_core::rng::{trip_rng, uniform};
use pollinator_core::{ContinuationSchedule, Landscape, OsmPlatform, Personality, PoolConfig, StartPair};

pub fn platform(id: &str, traffic: f64, dwell: f64) -> OsmPlatform {
    OsmPlatform {
        id: id.into(),
        name: id.to_string(),
        traffic_weight: traffic,
        dwell_time: dwell,
    }
}

pub fn personality(id: &str, presence: &[&str], attraction: &[(&str, f64)]) -> Personality {
    Personality {
        id: id.into(),
        name: id.to_string(),
        presence: presence.iter().map(|&p| p.into()).collect(),
        attraction: attraction.iter().map(|&(p, w)| (p.into(), w)).collect(),
        pool: None,
    }
}

/// Reference scenario S1 with geometric base `a`.
pub fn s1(a: f64) -> Landscape {
    Landscape {
        platforms: vec![platform("A", 1.0, 50.0), platform("B", 3.0, 100.0), platform("C", 1.0, 200.0)],
        personalities: vec![
            personality("P", &["A", "B", "C"], &[]),
            personality("QA", &["A", "B", "C"], &[("A", 1.0)]),
            personality("QB", &["A", "B", "C"], &[("B", 1.0)]),
            personality("QC", &["A", "B", "C"], &[("C", 1.0)]),
        ],
        return_weight: 1.0,
        schedule: ContinuationSchedule::Geometric { base: a },
    }
}

pub fn s1_start() -> StartPair {
    StartPair::new("P", "A")
}

/// A small random landscape (2–3 platforms, 1–3 personalities) whose start
/// pair `(P0, X0)` is always valid.
pub fn random_landscape(seed: u64) -> (Landscape, StartPair) {
    let mut rng = trip_rng(seed);
    let mut u = move || uniform(&mut rng);
    let n_plat = 2 + (u() * 2.0) as usize;
    let n_pers = 1 + (u() * 3.0) as usize;
    let ids: Vec<String> = (0..n_plat).map(|i| format!("X{i}")).collect();
    let platforms = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let traffic = if i == 1 { 0.1 + 4.9 * u() } else if u() < 0.2 { 0.0 } else { 5.0 * u() };
            platform(id, traffic, 1.0 + 299.0 * u())
        })
        .collect();
    let personalities = (0..n_pers)
        .map(|m| {
            let presence: Vec<_> = ids
                .iter()
                .enumerate()
                .filter(|(i, _)| (m == 0 && *i <= 1) || u() < 0.7)
                .map(|(_, id)| id.clone().into())
                .collect();
            let presence = if presence.is_empty() { vec![ids[0].clone().into()] } else { presence };
            let attraction: BTreeMap<_, _> = presence
                .iter()
                .map(|p: &pollinator_core::PlatformId| (p.clone(), if u() < 0.25 { 0.0 } else { 3.0 * u() }))
                .collect();
            let pool = (u() < 0.4).then(|| PoolConfig {
                enabled: u() < 0.8,
                pick_probability: u(),
                dwell_multiplier: 1.0 + 2.0 * u(),
            });
            Personality {
                id: format!("P{m}").into(),
                name: String::new(),
                presence,
                attraction,
                pool,
            }
        })
        .collect();
    let schedule = if u() < 0.6 {
        ContinuationSchedule::Geometric { base: 0.9 * u() }
    } else {
        let len = (u() * 4.0) as usize;
        let mut values = Vec::new();
        let mut top = 0.95;
        for _ in 0..len {
            top *= 0.2 + 0.7 * u();
            values.push(top);
        }
        ContinuationSchedule::Explicit { values }
    };
    let landscape = Landscape {
        platforms,
        personalities,
        return_weight: 0.05 + 2.95 * u(),
        schedule,
    };
    (landscape, StartPair::new("P0", "X0"))
}
