//! One function per subcommand. Each reads its inputs, writes its outputs
//! into `out_dir` under fixed file names, and returns the paths written.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pollinator_core::expectation::{
    compare_evaluators, expected_time_recursive, finite_difference_sensitivity, marginal_sensitivity,
    AlphaSum, CollapsedExpectation, Evaluator, ExpectationResult, SensitivityResult,
};
use pollinator_core::heterogeneity::{convergence_sim, median_media_length, MedianLengthResult, TrajectoryPoint};
use pollinator_core::revenue::{
    compute_revenue_table, depth_chart_data, pollination_uplift, uplift_dominance_check, DominanceReport,
    RevenueParams, RevenueRow,
};
use pollinator_core::trip::{MonteCarloPlan, TrafficReport};
use pollinator_core::{PlatformId, StartPair, SCHEMA_VERSION};
use serde::Serialize;

use crate::config::{Overrides, ScenarioConfig};
use crate::error::Failure;
use crate::parallel::{default_workers, run_plan, run_pool_comparison};
use crate::usage::{ingest_usage_csv, UsageError};

pub const TRAFFIC_REPORT: &str = "traffic_report.json";
pub const TRIP_TRACE: &str = "trips.jsonl";
pub const EXPECTATION: &str = "expectation.json";
pub const REVENUE_TABLE: &str = "revenue_table.csv";
pub const REVENUE_REPORT: &str = "revenue_report.json";
pub const SENSITIVITY: &str = "sensitivity.json";
pub const TRAJECTORY: &str = "trajectory.csv";
pub const HETERO_REPORT: &str = "hetero_report.json";
pub const POOL_COMPARISON: &str = "pool_comparison.json";

/// Default central-difference step, in seconds. The evaluators are linear in
/// each dwell time, so a large step loses nothing and keeps roundoff small.
pub const DEFAULT_FD_STEP: f64 = 1.0;

fn load(config: &Path, overrides: &Overrides) -> Result<ScenarioConfig, Failure> {
    let mut c = ScenarioConfig::load(config)?;
    for note in c.apply(overrides) {
        eprintln!("{note}");
    }
    Ok(c)
}

fn prepare(out_dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out_dir.display())))
}

fn write_file(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = out_dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(out_dir: &Path, name: &str, value: &T) -> Result<PathBuf, Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(out_dir, name, &text)
}

fn workers(config: &ScenarioConfig) -> usize {
    config.run.workers.unwrap_or_else(default_workers).max(1)
}

pub fn simulate(config: &Path, out_dir: &Path, overrides: &Overrides, trace: bool) -> Result<Vec<PathBuf>, Failure> {
    let config = load(config, overrides)?;
    let (landscape, start) = config.scenario()?;
    let run = &config.run;
    let plan = MonteCarloPlan::new(landscape, start, run.n_trips, run.master_seed, run.depth_cutoff)?;
    let report = run_plan(&plan, workers(&config));
    prepare(out_dir)?;
    let mut written = vec![write_json(out_dir, TRAFFIC_REPORT, &report)?];
    if trace {
        let path = out_dir.join(TRIP_TRACE);
        let file = fs::File::create(&path)?;
        let mut w = BufWriter::new(file);
        for i in 0..plan.n_trips() {
            serde_json::to_writer(&mut w, &plan.trace_trip(i))?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    depth_cutoff: u32,
    recursive: ExpectationResult,
}

#[derive(Debug, Serialize)]
struct ExpectationFile<'a> {
    schema_version: u32,
    start: &'a StartPair,
    depth_cutoff: u32,
    recursive: ExpectationResult,
    collapsed: CollapsedExpectation,
    divergence: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sweep: Vec<SweepPoint>,
}

/// Both evaluators at the configured cutoff. With `sweep = Some(k)` the
/// recursive value is also reported for every cutoff `0..=k`.
pub fn expect(config: &Path, out_dir: &Path, overrides: &Overrides, sweep: Option<u32>) -> Result<Vec<PathBuf>, Failure> {
    let config = load(config, overrides)?;
    let (landscape, start) = config.scenario()?;
    let cutoff = config.run.depth_cutoff;
    let cmp = compare_evaluators(landscape, start, cutoff)?;
    let sweep = match sweep {
        Some(k) => (0..=k)
            .map(|c| {
                Ok(SweepPoint {
                    depth_cutoff: c,
                    recursive: expected_time_recursive(landscape, start, c)?,
                })
            })
            .collect::<Result<_, Failure>>()?,
        None => Vec::new(),
    };
    prepare(out_dir)?;
    Ok(vec![write_json(
        out_dir,
        EXPECTATION,
        &ExpectationFile {
            schema_version: SCHEMA_VERSION,
            start,
            depth_cutoff: cutoff,
            recursive: cmp.recursive,
            collapsed: cmp.collapsed,
            divergence: cmp.divergence,
            sweep,
        },
    )?])
}

#[derive(Debug, Serialize)]
struct RevenueFile<'a> {
    schema_version: u32,
    params: RevenueParams,
    rows: &'a [RevenueRow],
    depth_chart: Vec<(String, f64)>,
    dominance: DominanceReport,
}

pub const REVENUE_HEADER: &str = "platform,time,ln_time,pct_mt,freq,depth,cwri,mwri,d_cwri,d_mwri";

/// Table rows with currency columns at 3 decimals, preceded by a
/// `# schema_version=N` line.
pub fn revenue_csv(rows: &[RevenueRow]) -> String {
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n{REVENUE_HEADER}\n");
    for r in rows {
        let name = if r.platform.contains([',', '"', '\n']) {
            format!("\"{}\"", r.platform.replace('"', "\"\""))
        } else {
            r.platform.clone()
        };
        writeln!(
            out,
            "{name},{},{:.4},{:.6},{},{:.4},{:.3},{:.3},{:.3},{:.3}",
            r.time, r.ln_time, r.pct_mt, r.freq, r.depth, r.cwri, r.mwri, r.d_cwri, r.d_mwri
        )
        .unwrap();
    }
    out
}

/// Revenue indices for a usage CSV. `csv` wins over the config's
/// `usage_csv`; the config itself is optional.
pub fn revenue(
    config: Option<&Path>,
    csv: Option<&Path>,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<Vec<PathBuf>, Failure> {
    let config = match config {
        Some(path) => load(path, overrides)?,
        None => {
            let mut c: ScenarioConfig = serde_json::from_str(&format!("{{\"schema_version\": {SCHEMA_VERSION}}}"))?;
            c.apply(overrides);
            c
        }
    };
    let csv_path = match (csv, &config.revenue.usage_csv) {
        (Some(p), Some(c)) => {
            eprintln!("override: usage_csv = {} (config had {})", p.display(), c.display());
            p.to_path_buf()
        }
        (Some(p), None) => p.to_path_buf(),
        (None, Some(c)) => c.clone(),
        (None, None) => return Err(Failure::validation("no usage CSV given (use --csv or revenue.usage_csv)")),
    };
    let rows = ingest_usage_csv(&csv_path).map_err(|e| match e {
        UsageError::FileNotFound(_) | UsageError::Io(_) => Failure::Runtime(e.to_string()),
        _ => Failure::validation(e.to_string()),
    })?;
    let params = config.revenue_params();
    let table = pollination_uplift(compute_revenue_table(&rows, params)?);
    prepare(out_dir)?;
    let csv_file = write_file(out_dir, REVENUE_TABLE, &revenue_csv(&table))?;
    let json_file = write_json(
        out_dir,
        REVENUE_REPORT,
        &RevenueFile {
            schema_version: SCHEMA_VERSION,
            params,
            depth_chart: depth_chart_data(&table),
            dominance: uplift_dominance_check(&table),
            rows: &table,
        },
    )?;
    Ok(vec![csv_file, json_file])
}

#[derive(Debug, Serialize)]
struct SensitivityFile {
    schema_version: u32,
    platform_id: PlatformId,
    depth_cutoff: u32,
    step_seconds: f64,
    analytic: SensitivityResult,
    finite_difference_collapsed: SensitivityResult,
    finite_difference_recursive: SensitivityResult,
    /// `|analytic − fd_collapsed| / max(|analytic|, tiny)`.
    relative_error: f64,
}

pub fn sensitivity(
    config: &Path,
    platform: &str,
    step_seconds: f64,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<Vec<PathBuf>, Failure> {
    let config = load(config, overrides)?;
    let (landscape, start) = config.scenario()?;
    let cutoff = config.run.depth_cutoff;
    let platform = PlatformId::from(platform);
    let alpha_sum = AlphaSum::Truncated { stages: cutoff };
    let analytic = marginal_sensitivity(landscape, start, &platform, alpha_sum)?;
    let fd_c = finite_difference_sensitivity(landscape, start, &platform, step_seconds, Evaluator::Collapsed { alpha_sum })?;
    let fd_r = finite_difference_sensitivity(
        landscape,
        start,
        &platform,
        step_seconds,
        Evaluator::Recursive { depth_cutoff: cutoff },
    )?;
    for note in &analytic.notes {
        eprintln!("diagnostic: {note:?} for platform {platform}");
    }
    let relative_error = (analytic.derivative - fd_c.derivative).abs() / analytic.derivative.abs().max(f64::MIN_POSITIVE);
    prepare(out_dir)?;
    Ok(vec![write_json(
        out_dir,
        SENSITIVITY,
        &SensitivityFile {
            schema_version: SCHEMA_VERSION,
            platform_id: platform,
            depth_cutoff: cutoff,
            step_seconds,
            relative_error: if analytic.derivative == fd_c.derivative { 0.0 } else { relative_error },
            analytic,
            finite_difference_collapsed: fd_c,
            finite_difference_recursive: fd_r,
        },
    )?])
}

#[derive(Debug, Serialize)]
struct HeteroFile {
    schema_version: u32,
    initial_median: MedianLengthResult,
    /// Median after the last simulated step; absent without two profiles.
    final_median: Option<MedianLengthResult>,
    final_gap: Option<f64>,
    steps: u32,
}

pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = format!("# schema_version={SCHEMA_VERSION}\nstep,mu_a,mu_b,gap\n");
    for p in points {
        writeln!(out, "{},{},{},{}", p.step, p.mu_a, p.mu_b, p.gap).unwrap();
    }
    out
}

/// Median length of the configured profiles and, for exactly two profiles,
/// the homogenization trajectory.
pub fn hetero(config: &Path, out_dir: &Path, overrides: &Overrides) -> Result<Vec<PathBuf>, Failure> {
    let config = load(config, overrides)?;
    let h = config.heterogeneity()?;
    let initial_median = median_media_length(&h.profiles, h.search_interval, h.grid_resolution)?;
    let trajectory = match h.profiles.as_slice() {
        [a, b] => Some(convergence_sim(a, b, &h.shared_pool_lengths, h.learning_rate, h.steps)?),
        _ => {
            eprintln!("note: trajectory needs exactly two profiles, found {}", h.profiles.len());
            None
        }
    };
    let final_median = match &trajectory {
        Some(t) => {
            let last = t.last().expect("trajectory has a step-0 row");
            let mut moved = h.profiles.clone();
            moved[0].preferred_length = last.mu_a;
            moved[1].preferred_length = last.mu_b;
            Some(median_media_length(&moved, h.search_interval, h.grid_resolution)?)
        }
        None => None,
    };
    prepare(out_dir)?;
    let mut written = Vec::new();
    if let Some(t) = &trajectory {
        written.push(write_file(out_dir, TRAJECTORY, &trajectory_csv(t))?);
    }
    written.push(write_json(
        out_dir,
        HETERO_REPORT,
        &HeteroFile {
            schema_version: SCHEMA_VERSION,
            initial_median,
            final_median,
            final_gap: trajectory.as_ref().and_then(|t| t.last()).map(|p| p.gap),
            steps: h.steps,
        },
    )?);
    Ok(written)
}

#[derive(Debug, Serialize)]
struct ShareDelta {
    platform_id: PlatformId,
    /// Enabled share minus disabled share.
    delta: f64,
    combined_standard_error: f64,
    within_three_se: bool,
}

#[derive(Debug, Serialize)]
struct PoolComparisonFile {
    schema_version: u32,
    disabled: TrafficReport,
    enabled: TrafficReport,
    share_deltas: Vec<ShareDelta>,
    /// Enabled mean over disabled mean.
    mean_ratio: f64,
}

pub fn pool_compare(config: &Path, out_dir: &Path, overrides: &Overrides) -> Result<Vec<PathBuf>, Failure> {
    let config = load(config, overrides)?;
    let (landscape, start) = config.scenario()?;
    let run = &config.run;
    let (disabled, enabled) =
        run_pool_comparison(landscape, start, run.n_trips, run.master_seed, run.depth_cutoff, workers(&config))?;
    let share_deltas = disabled
        .platforms
        .iter()
        .zip(&enabled.platforms)
        .map(|(off, on)| {
            let delta = on.share_of_landings - off.share_of_landings;
            let se = off.share_standard_error.hypot(on.share_standard_error);
            ShareDelta {
                platform_id: off.platform_id.clone(),
                delta,
                combined_standard_error: se,
                within_three_se: delta.abs() <= 3.0 * se,
            }
        })
        .collect();
    prepare(out_dir)?;
    Ok(vec![write_json(
        out_dir,
        POOL_COMPARISON,
        &PoolComparisonFile {
            schema_version: SCHEMA_VERSION,
            mean_ratio: enabled.mean_trip_seconds / disabled.mean_trip_seconds,
            disabled,
            enabled,
            share_deltas,
        },
    )?])
}
