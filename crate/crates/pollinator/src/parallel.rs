//! Runs Monte Carlo plans on a rayon pool. Chunks are computed in any order
//! and merged in chunk order, so the report is identical for every worker
//! count.

use pollinator_core::trip::{MonteCarloPlan, PoolComparisonPlan, TrafficReport, TrafficTally};
use pollinator_core::{Landscape, Result as CoreResult, StartPair};
use rayon::prelude::*;

pub fn run_plan(plan: &MonteCarloPlan, workers: usize) -> TrafficReport {
    let chunks: Vec<TrafficTally> = if workers <= 1 {
        (0..plan.chunk_count()).map(|c| plan.run_chunk(c)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to build worker pool");
        pool.install(|| {
            (0..plan.chunk_count())
                .into_par_iter()
                .map(|c| plan.run_chunk(c))
                .collect()
        })
    };
    plan.finish(&chunks)
}

pub fn run_monte_carlo(
    landscape: &Landscape,
    start: &StartPair,
    n_trips: u64,
    master_seed: u64,
    depth_cutoff: u32,
    workers: usize,
) -> CoreResult<TrafficReport> {
    let plan = MonteCarloPlan::new(landscape, start, n_trips, master_seed, depth_cutoff)?;
    Ok(run_plan(&plan, workers))
}

/// `(pools disabled, pools enabled)`.
pub fn run_pool_comparison(
    landscape: &Landscape,
    start: &StartPair,
    n_trips: u64,
    master_seed: u64,
    depth_cutoff: u32,
    workers: usize,
) -> CoreResult<(TrafficReport, TrafficReport)> {
    let plan = PoolComparisonPlan::new(landscape, start, n_trips, master_seed, depth_cutoff)?;
    Ok((run_plan(&plan.disabled, workers), run_plan(&plan.enabled, workers)))
}

/// Default worker count: the machine's available parallelism.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
