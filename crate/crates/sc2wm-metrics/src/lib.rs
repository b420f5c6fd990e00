//! Online match metrics aggregated over agent episode logs.
//!
//! Six percentages summarize a batch of [`MatchLog`]s:
//!
//! * **Win Rate**: games won over games played.
//! * **Supply Block Rate**: seconds spent supply-blocked over observed
//!   game seconds.
//! * **Resource Conversion Rate**: resources spent over resources
//!   collected (minerals plus gas).
//! * **Kill-Loss Ratio**: enemy army value killed over own army value
//!   lost. Unbounded above; every other metric lies in `[0, 100]`.
//! * **Valid Action Rate**: issued actions the environment accepted over
//!   all issued actions.
//! * **Action Revision Rate**: decision steps whose refined action set
//!   differs from the initial proposal, over all decision steps.
//!
//! [`compute_log_metrics`] scores one log; [`compute_match_metrics`]
//! scores a batch and reports each metric per log plus mean and standard
//! deviation across logs. A metric whose denominator is zero in some log
//! (for example no army value lost) is absent for that log rather than an
//! error, and absent values drop out of the cross-log summary.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use sc2wm_agent::{MatchLog, MatchResult};

/// Report column names, in table order. [`LogMetrics::values`] and
/// [`MetricsReport::summaries`] yield values in this same order.
pub const COLUMNS: [&str; 6] = [
    "Win Rate (%)",
    "Supply Block Rate (%)",
    "Resource Conversion Rate (%)",
    "Kill-Loss Ratio (%)",
    "Valid Action Rate (%)",
    "Action Revision Rate (%)",
];

const KLR_COLUMN: usize = 3;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no match logs supplied")]
    Empty,
    #[error("invalid log: {0}")]
    InvalidLog(String),
    #[error("match {match_id}: {column} is {value} which is out of range")]
    OutOfRange {
        match_id: String,
        column: &'static str,
        value: f64,
    },
}

/// Metric values for a single match, as percentages. `None` marks a
/// metric whose denominator was zero for this log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMetrics {
    pub match_id: String,
    pub win_rate: Option<f64>,
    pub supply_block_rate: Option<f64>,
    pub resource_conversion_rate: Option<f64>,
    pub kill_loss_ratio: Option<f64>,
    pub valid_action_rate: Option<f64>,
    pub action_revision_rate: Option<f64>,
}

impl LogMetrics {
    /// Values in [`COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 6] {
        [
            self.win_rate,
            self.supply_block_rate,
            self.resource_conversion_rate,
            self.kill_loss_ratio,
            self.valid_action_rate,
            self.action_revision_rate,
        ]
    }

    fn check_ranges(&self) -> Result<(), MetricsError> {
        for (i, (column, value)) in COLUMNS.iter().zip(self.values()).enumerate() {
            let Some(v) = value else { continue };
            let capped = i != KLR_COLUMN;
            if !v.is_finite() || v < 0.0 || (capped && v > 100.0) {
                return Err(MetricsError::OutOfRange {
                    match_id: self.match_id.clone(),
                    column,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Mean and standard deviation of one metric across the logs where it
/// was defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Population standard deviation; 0.0 when one log contributes.
    pub std: f64,
    /// Number of logs in which the metric was defined.
    pub n: usize,
}

/// Per-log metric values plus one cross-log summary per column.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub per_log: Vec<LogMetrics>,
    pub win_rate: Option<MetricSummary>,
    pub supply_block_rate: Option<MetricSummary>,
    pub resource_conversion_rate: Option<MetricSummary>,
    pub kill_loss_ratio: Option<MetricSummary>,
    pub valid_action_rate: Option<MetricSummary>,
    pub action_revision_rate: Option<MetricSummary>,
}

impl MetricsReport {
    /// Summaries in [`COLUMNS`] order.
    pub fn summaries(&self) -> [Option<MetricSummary>; 6] {
        [
            self.win_rate,
            self.supply_block_rate,
            self.resource_conversion_rate,
            self.kill_loss_ratio,
            self.valid_action_rate,
            self.action_revision_rate,
        ]
    }
}

fn pct(numerator: f64, denominator: f64) -> Option<f64> {
    if denominator == 0.0 {
        None
    } else {
        Some(numerator * 100.0 / denominator)
    }
}

/// Scores one log. Cumulative telemetry series are read at their final
/// row; the supply-block clock counts telemetry rows, one per observed
/// game second.
pub fn compute_log_metrics(log: &MatchLog) -> Result<LogMetrics, MetricsError> {
    log.validate()
        .map_err(|e| MetricsError::InvalidLog(e.to_string()))?;
    let blocked = log.telemetry.iter().filter(|row| row.supply_blocked).count();
    let last = log.telemetry.last();
    let valid = log.issued.iter().filter(|a| a.valid).count();
    let revised = log.steps.iter().filter(|s| s.revised).count();
    let metrics = LogMetrics {
        match_id: log.match_id.clone(),
        win_rate: Some(if log.result == MatchResult::Win { 100.0 } else { 0.0 }),
        supply_block_rate: pct(blocked as f64, log.telemetry.len() as f64),
        resource_conversion_rate: last.and_then(|row| {
            pct(
                (row.minerals_spent + row.gas_spent) as f64,
                (row.minerals_collected + row.gas_collected) as f64,
            )
        }),
        kill_loss_ratio: last
            .and_then(|row| pct(row.killed_army_value as f64, row.lost_army_value as f64)),
        valid_action_rate: pct(valid as f64, log.issued.len() as f64),
        action_revision_rate: pct(revised as f64, log.steps.len() as f64),
    };
    metrics.check_ranges()?;
    Ok(metrics)
}

fn summarize(mut values: Vec<f64>) -> Option<MetricSummary> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    Some(MetricSummary {
        mean,
        std: variance.sqrt(),
        n,
    })
}

/// Scores a batch of logs: per-log values plus mean and standard
/// deviation per metric. Summaries are invariant under reordering of
/// `logs` (values are sorted before accumulating).
pub fn compute_match_metrics(logs: &[MatchLog]) -> Result<MetricsReport, MetricsError> {
    if logs.is_empty() {
        return Err(MetricsError::Empty);
    }
    let per_log = logs
        .iter()
        .map(compute_log_metrics)
        .collect::<Result<Vec<_>, _>>()?;
    let column =
        |pick: fn(&LogMetrics) -> Option<f64>| summarize(per_log.iter().filter_map(pick).collect());
    Ok(MetricsReport {
        win_rate: column(|m| m.win_rate),
        supply_block_rate: column(|m| m.supply_block_rate),
        resource_conversion_rate: column(|m| m.resource_conversion_rate),
        kill_loss_ratio: column(|m| m.kill_loss_ratio),
        valid_action_rate: column(|m| m.valid_action_rate),
        action_revision_rate: column(|m| m.action_revision_rate),
        per_log,
    })
}

/// Renders the report as a JSON document with a `per_log` array and a
/// `summary` object, both keyed by the [`COLUMNS`] names. Absent metrics
/// appear as `null`.
pub fn report_to_json(report: &MetricsReport) -> String {
    let per_log: Vec<Value> = report
        .per_log
        .iter()
        .map(|m| {
            let mut row = Map::new();
            row.insert("match_id".into(), json!(m.match_id));
            for (column, value) in COLUMNS.iter().zip(m.values()) {
                row.insert((*column).into(), json!(value));
            }
            Value::Object(row)
        })
        .collect();
    let mut summary = Map::new();
    for (column, s) in COLUMNS.iter().zip(report.summaries()) {
        let cell = match s {
            Some(s) => json!({ "mean": s.mean, "std": s.std, "n": s.n }),
            None => Value::Null,
        };
        summary.insert((*column).into(), cell);
    }
    let mut text =
        serde_json::to_string_pretty(&json!({ "per_log": per_log, "summary": summary })).unwrap();
    text.push('\n');
    text
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn csv_row(label: &str, cells: impl Iterator<Item = Option<f64>>) -> String {
    let mut row = csv_field(label);
    for cell in cells {
        row.push(',');
        if let Some(v) = cell {
            row.push_str(&format!("{v}"));
        }
    }
    row.push('\n');
    row
}

/// Renders the report as CSV: a header row of [`COLUMNS`], one row per
/// log, then `mean` and `std` footer rows. Absent metrics are empty
/// cells.
pub fn report_to_csv(report: &MetricsReport) -> String {
    let mut out = String::from("match_id");
    for column in COLUMNS {
        out.push(',');
        out.push_str(column);
    }
    out.push('\n');
    for m in &report.per_log {
        out.push_str(&csv_row(&m.match_id, m.values().into_iter()));
    }
    let summaries = report.summaries();
    out.push_str(&csv_row(
        "mean",
        summaries.iter().map(|s| s.map(|s| s.mean)),
    ));
    out.push_str(&csv_row("std", summaries.iter().map(|s| s.map(|s| s.std))));
    out
}
