//! Scenario config files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "landscape": {
//!     "platforms": [{"id": "A", "traffic_weight": 1.0, "dwell_time": 50.0}],
//!     "personalities": [{"id": "P", "presence": ["A"], "attraction": {},
//!                        "pool": {"enabled": true, "pick_probability": 0.3, "dwell_multiplier": 1.0}}],
//!     "return_weight": 1.0,
//!     "schedule": {"kind": "geometric", "base": 0.5}
//!   },
//!   "start": {"personality": "P", "platform": "A"},
//!   "run": {"n_trips": 100000, "master_seed": 0, "depth_cutoff": 64, "workers": 4},
//!   "revenue": {"cpc": 2.0, "cpm": 7.0, "usage_csv": "usage.csv"},
//!   "heterogeneity": {
//!     "profiles": [{"type_label": "A", "preferred_length": 10.0, "width": 5.0},
//!                  {"type_label": "B", "preferred_length": 30.0, "width": 5.0}],
//!     "shared_pool_lengths": [20.0], "learning_rate": 0.5, "steps": 10,
//!     "search_interval": [1.0, 60.0], "grid_resolution": 0.01
//!   }
//! }
//! ```
//!
//! Every section is optional; commands complain about the ones they need.
//! `usage_csv` is resolved relative to the config file.

use std::path::{Path, PathBuf};

use pollinator_core::heterogeneity::EngagementProfile;
use pollinator_core::landscape::validate_landscape;
use pollinator_core::revenue::RevenueParams;
use pollinator_core::trip::DEFAULT_DEPTH_CUTOFF;
use pollinator_core::{Landscape, StartPair, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};

use crate::error::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub landscape: Option<Landscape>,
    #[serde(default)]
    pub start: Option<StartPair>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub revenue: RevenueConfig,
    #[serde(default)]
    pub heterogeneity: Option<HeterogeneityConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_trips: u64,
    pub master_seed: u64,
    pub depth_cutoff: u32,
    /// Defaults to the machine's available parallelism.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_trips: 100_000,
            master_seed: 0,
            depth_cutoff: DEFAULT_DEPTH_CUTOFF,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RevenueConfig {
    pub cpc: f64,
    pub cpm: f64,
    pub usage_csv: Option<PathBuf>,
}

impl Default for RevenueConfig {
    fn default() -> Self {
        let p = RevenueParams::default();
        Self {
            cpc: p.cpc,
            cpm: p.cpm,
            usage_csv: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeterogeneityConfig {
    pub profiles: Vec<EngagementProfile>,
    pub shared_pool_lengths: Vec<f64>,
    pub learning_rate: f64,
    pub steps: u32,
    pub search_interval: (f64, f64),
    pub grid_resolution: f64,
}

/// Values given on the command line. Each one that is set replaces the
/// config value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trips: Option<u64>,
    pub cutoff: Option<u32>,
    pub cpc: Option<f64>,
    pub cpm: Option<f64>,
    pub workers: Option<usize>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| Failure::validation(format!("malformed config {}: {e}", path.display())))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(Failure::validation(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        if let Some(csv) = &config.revenue.usage_csv {
            if csv.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.revenue.usage_csv = Some(base.join(csv));
            }
        }
        Ok(config)
    }

    /// Applies `overrides` and returns one note per replaced value that
    /// differed from the config.
    pub fn apply(&mut self, overrides: &Overrides) -> Vec<String> {
        let mut notes = Vec::new();
        fn set<T: PartialEq + std::fmt::Debug + Copy>(
            notes: &mut Vec<String>,
            name: &str,
            slot: &mut T,
            value: Option<T>,
        ) {
            if let Some(v) = value {
                if *slot != v {
                    notes.push(format!("override: {name} = {v:?} (config had {:?})", *slot));
                }
                *slot = v;
            }
        }
        set(&mut notes, "master_seed", &mut self.run.master_seed, overrides.seed);
        set(&mut notes, "n_trips", &mut self.run.n_trips, overrides.trips);
        set(&mut notes, "depth_cutoff", &mut self.run.depth_cutoff, overrides.cutoff);
        set(&mut notes, "cpc", &mut self.revenue.cpc, overrides.cpc);
        set(&mut notes, "cpm", &mut self.revenue.cpm, overrides.cpm);
        if let Some(w) = overrides.workers {
            if self.run.workers.is_some_and(|c| c != w) {
                notes.push(format!("override: workers = {w} (config had {:?})", self.run.workers.unwrap()));
            }
            self.run.workers = Some(w);
        }
        notes
    }

    /// The landscape and start pair, after validation.
    pub fn scenario(&self) -> Result<(&Landscape, &StartPair), Failure> {
        let landscape = self
            .landscape
            .as_ref()
            .ok_or_else(|| Failure::validation("config has no landscape section"))?;
        let start = self
            .start
            .as_ref()
            .ok_or_else(|| Failure::validation("config has no start section"))?;
        let diagnostics = validate_landscape(landscape);
        if !diagnostics.is_empty() {
            return Err(Failure::Validation(
                diagnostics.iter().map(ToString::to_string).collect(),
            ));
        }
        landscape.check_start(start)?;
        Ok((landscape, start))
    }

    pub fn heterogeneity(&self) -> Result<&HeterogeneityConfig, Failure> {
        self.heterogeneity
            .as_ref()
            .ok_or_else(|| Failure::validation("config has no heterogeneity section"))
    }

    pub fn revenue_params(&self) -> RevenueParams {
        RevenueParams {
            cpc: self.revenue.cpc,
            cpm: self.revenue.cpm,
        }
    }
}
