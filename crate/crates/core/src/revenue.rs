//! Weekly advertising revenue indices per platform, and the extra revenue
//! one more pollinator-mediated visit brings.
//!
//! For each platform with `TIME` minutes per day and `FREQ` visits per week:
//!
//! | column   | definition                         |
//! |----------|------------------------------------|
//! | LN(TIME) | `ln(60 × TIME)` (seconds per day)  |
//! | %MT      | `TIME / Σ TIME`                    |
//! | DEPTH    | `FREQ × LN(TIME)`                  |
//! | CWRI     | `cpc × %MT × DEPTH`                |
//! | MWRI     | `cpm × FREQ × TIME / 100`          |
//! | ΔCWRI    | `%MT × CWRI`                       |
//! | ΔMWRI    | `%MT × MWRI`                       |

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageRow {
    pub platform: String,
    pub time_min_per_day: f64,
    pub freq_visits_per_week: f64,
}

impl UsageRow {
    pub fn new(platform: impl Into<String>, time_min_per_day: f64, freq_visits_per_week: f64) -> Self {
        Self {
            platform: platform.into(),
            time_min_per_day,
            freq_visits_per_week,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevenueParams {
    /// Cost per click.
    pub cpc: f64,
    /// Cost per thousand impressions.
    pub cpm: f64,
}

impl Default for RevenueParams {
    fn default() -> Self {
        Self { cpc: 2.0, cpm: 7.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevenueRow {
    pub platform: String,
    pub time: f64,
    pub ln_time: f64,
    /// Share of total time, as a fraction in `[0, 1]`.
    pub pct_mt: f64,
    pub freq: f64,
    pub depth: f64,
    pub cwri: f64,
    pub mwri: f64,
    pub d_cwri: f64,
    pub d_mwri: f64,
}

fn positive(platform: &str, field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveValue {
            platform: platform.into(),
            field,
            value,
        })
    }
}

/// Derived columns for every row, in input order. The uplift columns are
/// left at zero; see [`pollination_uplift`].
pub fn compute_revenue_table(rows: &[UsageRow], params: RevenueParams) -> Result<Vec<RevenueRow>> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(params.cpc > 0.0 && params.cpm > 0.0 && params.cpc.is_finite() && params.cpm.is_finite()) {
        return Err(Error::InvalidRevenueParams {
            cpc: params.cpc,
            cpm: params.cpm,
        });
    }
    for row in rows {
        positive(&row.platform, "time_min_per_day", row.time_min_per_day)?;
        positive(&row.platform, "freq_visits_per_week", row.freq_visits_per_week)?;
    }
    let total_time: f64 = rows.iter().map(|r| r.time_min_per_day).sum();
    Ok(rows
        .iter()
        .map(|r| {
            let ln_time = libm::log(60.0 * r.time_min_per_day);
            let pct_mt = r.time_min_per_day / total_time;
            let depth = r.freq_visits_per_week * ln_time;
            RevenueRow {
                platform: r.platform.clone(),
                time: r.time_min_per_day,
                ln_time,
                pct_mt,
                freq: r.freq_visits_per_week,
                depth,
                cwri: params.cpc * (pct_mt * depth),
                mwri: params.cpm * (r.freq_visits_per_week * r.time_min_per_day / 100.0),
                d_cwri: 0.0,
                d_mwri: 0.0,
            }
        })
        .collect())
}

/// Fills `d_cwri` and `d_mwri`.
pub fn pollination_uplift(mut table: Vec<RevenueRow>) -> Vec<RevenueRow> {
    for row in &mut table {
        row.d_cwri = row.pct_mt * row.cwri;
        row.d_mwri = row.pct_mt * row.mwri;
    }
    table
}

/// `(platform, depth)` pairs, deepest first. Ties keep input order.
pub fn depth_chart_data(table: &[RevenueRow]) -> Vec<(String, f64)> {
    let mut pairs: Vec<(String, f64)> = table.iter().map(|r| (r.platform.clone(), r.depth)).collect();
    pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    /// True when the uplift order equals the time-share order.
    pub agrees: bool,
    /// Platforms by descending ΔCWRI.
    pub uplift_order: Vec<String>,
    /// Platforms by descending %MT.
    pub share_order: Vec<String>,
    /// `(a, b)` where `a` precedes `b` by share but follows it by uplift.
    pub inversions: Vec<(String, String)>,
}

fn descending_by(table: &[RevenueRow], key: impl Fn(&RevenueRow) -> f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..table.len()).collect();
    idx.sort_by(|&a, &b| key(&table[b]).total_cmp(&key(&table[a])));
    idx
}

/// Checks whether per-pollination CPC uplift is ordered like traffic share.
/// Both orders break ties by input position.
pub fn uplift_dominance_check(table: &[RevenueRow]) -> DominanceReport {
    let by_share = descending_by(table, |r| r.pct_mt);
    let by_uplift = descending_by(table, |r| r.d_cwri);
    let mut uplift_rank = alloc::vec![0usize; table.len()];
    for (rank, &i) in by_uplift.iter().enumerate() {
        uplift_rank[i] = rank;
    }
    let mut inversions = Vec::new();
    for (pos, &a) in by_share.iter().enumerate() {
        for &b in &by_share[pos + 1..] {
            if uplift_rank[a] > uplift_rank[b] {
                inversions.push((table[a].platform.clone(), table[b].platform.clone()));
            }
        }
    }
    let name = |i: &usize| table[*i].platform.clone();
    DominanceReport {
        agrees: inversions.is_empty(),
        uplift_order: by_uplift.iter().map(name).collect(),
        share_order: by_share.iter().map(name).collect(),
        inversions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn table(rows: &[UsageRow]) -> Vec<RevenueRow> {
        pollination_uplift(compute_revenue_table(rows, RevenueParams::default()).unwrap())
    }

    #[test]
    fn single_row_normalizes() {
        let t = table(&[UsageRow::new("ONLY", 1.0, 2.0)]);
        assert_eq!(t[0].pct_mt, 1.0);
        assert!((t[0].ln_time - 4.094_344_562_222_1).abs() < 1e-12);
        assert_eq!(t[0].d_cwri, t[0].cwri);
        assert_eq!(depth_chart_data(&t).len(), 1);
        assert!(uplift_dominance_check(&t).agrees);
    }

    #[test]
    fn facebook_row_arithmetic() {
        let t = table(&[UsageRow::new("FACEBOOK", 22.6, 4.5), UsageRow::new("OTHER", 117.2, 1.0)]);
        assert!((t[0].ln_time - libm::log(1356.0)).abs() < 1e-15);
        assert!((t[0].mwri - 7.0 * 4.5 * 22.6 / 100.0).abs() < 1e-12);
    }

    #[test]
    fn zero_share_has_zero_uplift() {
        let mut t = table(&[UsageRow::new("A", 1.0, 1.0)]);
        t[0].pct_mt = 0.0;
        let t = pollination_uplift(t);
        assert_eq!((t[0].d_cwri, t[0].d_mwri), (0.0, 0.0));
    }

    #[test]
    fn errors() {
        assert_eq!(compute_revenue_table(&[], RevenueParams::default()), Err(Error::EmptyDataset));
        assert!(matches!(
            compute_revenue_table(&[UsageRow::new("A", 0.0, 1.0)], RevenueParams::default()),
            Err(Error::NonPositiveValue { field: "time_min_per_day", .. })
        ));
        assert!(matches!(
            compute_revenue_table(&[UsageRow::new("A", 1.0, 1.0)], RevenueParams { cpc: 0.0, cpm: 7.0 }),
            Err(Error::InvalidRevenueParams { .. })
        ));
    }

    #[test]
    fn equal_time_tie_broken_by_depth_is_an_inversion() {
        let t = table(&[UsageRow::new("LOW", 10.0, 1.0), UsageRow::new("HIGH", 10.0, 10.0)]);
        let report = uplift_dominance_check(&t);
        assert!(!report.agrees);
        assert_eq!(report.share_order, vec!["LOW", "HIGH"]);
        assert_eq!(report.uplift_order, vec!["HIGH", "LOW"]);
        assert_eq!(report.inversions, vec![("LOW".into(), "HIGH".into())]);
    }

    #[test]
    fn depth_chart_sorted_descending() {
        let t = table(&[
            UsageRow::new("A", 1.0, 1.0),
            UsageRow::new("B", 10.0, 5.0),
            UsageRow::new("C", 5.0, 2.0),
        ]);
        let chart = depth_chart_data(&t);
        let names: Vec<&str> = chart.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["B", "C", "A"]);
    }
}
