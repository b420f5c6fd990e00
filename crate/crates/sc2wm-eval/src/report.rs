use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{EntityCategory, EvalConfig, ScalarField};
use crate::error::EvalError;
use crate::metrics::f1_from_counts;
use crate::sample::SampleEval;

/// One metric row of the aggregated report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub classification: String,
    pub metric: String,
    /// Absent when the metric is undefined over the corpus (for example a
    /// MAE with no matched pairs).
    pub value: Option<f64>,
}

/// Mean AWD of one entity category within one time bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesPoint {
    pub bin_start_s: u32,
    pub category: String,
    pub mean_awd: f64,
}

/// Aggregated evaluation over a sample corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub samples: usize,
    pub rows: Vec<ReportRow>,
    /// Mean of the self-side category AWDs.
    pub self_awd: f64,
    /// Mean of the enemy-side category AWDs.
    pub enemy_awd: f64,
    /// Set when the alerts F1 is a vacuous 1.0 (no active frame in the corpus).
    pub alerts_vacuous: bool,
    /// Set when the upgrades F1 is a vacuous 1.0.
    pub upgrades_vacuous: bool,
    /// Where the worker count came from; the supply breakdown by default.
    pub workers_source: String,
    pub time_series: Vec<TimeSeriesPoint>,
}

impl EvalReport {
    /// Looks a metric value up by its row name.
    pub fn value(&self, metric: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.metric == metric).and_then(|r| r.value)
    }
}

const MACRO_CLASS: &str = "Macro-Situation Consistency";
const ECON_CLASS: &str = "Economy & Status";
const DEV_CLASS: &str = "Development";
const MICRO_CLASS: &str = "Micro Entity Attributes";

struct CategoryPool {
    tp: u64,
    fp: u64,
    fn_: u64,
    hp_errors: Vec<f64>,
    energy_errors: Vec<f64>,
    awd_sum: f64,
    per_sample_f1: Vec<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Pools per-sample evaluations into the aggregated report.
///
/// Scalar SMAPEs and category AWDs average over samples; F1 metrics pool
/// TP/FP/FN across the corpus (micro averaging) unless `cfg.macro_f1` asks
/// for the mean of per-sample scores; MAEs average over all matched pairs.
pub fn aggregate(per_sample: &[SampleEval], cfg: &EvalConfig) -> Result<EvalReport, EvalError> {
    if per_sample.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = per_sample.len() as f64;
    let mut rows = Vec::new();

    // Macro-situation: mean AWD per category, self/enemy side means.
    let categories = EntityCategory::all();
    let mut pools: Vec<CategoryPool> = categories
        .iter()
        .map(|_| CategoryPool {
            tp: 0,
            fp: 0,
            fn_: 0,
            hp_errors: Vec::new(),
            energy_errors: Vec::new(),
            awd_sum: 0.0,
            per_sample_f1: Vec::new(),
        })
        .collect();
    for sample in per_sample {
        for (slot, pool) in categories.iter().zip(&mut pools) {
            let cat = sample
                .categories
                .iter()
                .find(|c| c.category == *slot)
                .expect("evaluate_sample fills every category");
            pool.tp += cat.tp;
            pool.fp += cat.fp;
            pool.fn_ += cat.fn_;
            pool.hp_errors.extend_from_slice(&cat.hp_abs_errors);
            pool.energy_errors.extend_from_slice(&cat.energy_abs_errors);
            pool.awd_sum += cat.awd;
            if let Some(f1) = f1_from_counts(cat.tp, cat.fp, cat.fn_) {
                pool.per_sample_f1.push(f1);
            }
        }
    }
    let awd_means: Vec<f64> = pools.iter().map(|p| p.awd_sum / n).collect();
    for (cat, awd) in categories.iter().zip(&awd_means) {
        rows.push(ReportRow {
            classification: MACRO_CLASS.to_string(),
            metric: cat.awd_row_name().to_string(),
            value: Some(*awd),
        });
    }
    let side_mean = |self_side: bool| {
        let values: Vec<f64> = categories
            .iter()
            .zip(&awd_means)
            .filter(|(c, _)| c.is_self_side() == self_side)
            .map(|(_, &v)| v)
            .collect();
        mean(&values).expect("both sides have categories")
    };
    let self_awd = side_mean(true);
    let enemy_awd = side_mean(false);

    // Economy & status: scalar SMAPE means and active-frame set F1s.
    let scalar_row = |field: ScalarField| -> ReportRow {
        let terms: Vec<f64> = per_sample
            .iter()
            .flat_map(|s| s.scalars.iter().filter(|t| t.field == field).map(|t| t.term))
            .collect();
        ReportRow {
            classification: ECON_CLASS.to_string(),
            metric: field.row_name().to_string(),
            value: mean(&terms),
        }
    };
    for &field in cfg.scalar_fields.iter().filter(|&&f| f != ScalarField::WorkersNum) {
        rows.push(scalar_row(field));
    }

    let set_f1 = |triples: Vec<crate::sample::SetTriple>| -> (Option<f64>, bool) {
        let active: Vec<_> = triples.iter().filter(|t| t.active).collect();
        if active.is_empty() {
            return (Some(1.0), true);
        }
        if cfg.macro_f1 {
            let scores: Vec<f64> = active
                .iter()
                .map(|t| f1_from_counts(t.tp, t.fp, t.fn_).unwrap_or(0.0))
                .collect();
            (mean(&scores), false)
        } else {
            let tp = active.iter().map(|t| t.tp).sum();
            let fp = active.iter().map(|t| t.fp).sum();
            let fn_ = active.iter().map(|t| t.fn_).sum();
            (Some(f1_from_counts(tp, fp, fn_).unwrap_or(0.0)), false)
        }
    };
    let (alerts_f1, alerts_vacuous) = set_f1(per_sample.iter().map(|s| s.alerts).collect());
    let (upgrades_f1, upgrades_vacuous) = set_f1(per_sample.iter().map(|s| s.upgrades).collect());
    rows.push(ReportRow {
        classification: ECON_CLASS.to_string(),
        metric: "Alerts F1".to_string(),
        value: alerts_f1,
    });
    rows.push(ReportRow {
        classification: ECON_CLASS.to_string(),
        metric: "Upgrades F1".to_string(),
        value: upgrades_f1,
    });
    if cfg.scalar_fields.contains(&ScalarField::WorkersNum) {
        rows.push(scalar_row(ScalarField::WorkersNum));
    }

    // Development: queue F1 and progress MAE.
    let queue_f1 = if cfg.macro_f1 {
        let scores: Vec<f64> = per_sample
            .iter()
            .filter_map(|s| f1_from_counts(s.queue.tp, s.queue.fp, s.queue.fn_))
            .collect();
        mean(&scores)
    } else {
        let tp: u64 = per_sample.iter().map(|s| s.queue.tp).sum();
        let fp: u64 = per_sample.iter().map(|s| s.queue.fp).sum();
        let fn_: u64 = per_sample.iter().map(|s| s.queue.fn_).sum();
        if tp + fp + fn_ == 0 {
            Some(1.0)
        } else {
            f1_from_counts(tp, fp, fn_)
        }
    };
    let progress_errors: Vec<f64> = per_sample
        .iter()
        .flat_map(|s| s.queue.progress_abs_errors.iter().copied())
        .collect();
    rows.push(ReportRow {
        classification: DEV_CLASS.to_string(),
        metric: "Queue F1".to_string(),
        value: queue_f1,
    });
    rows.push(ReportRow {
        classification: DEV_CLASS.to_string(),
        metric: "Progress(%) MAE".to_string(),
        value: mean(&progress_errors),
    });

    // Micro entity attributes per category.
    for (cat, pool) in categories.iter().zip(&pools) {
        let prefix = cat.micro_prefix();
        let f1 = if cfg.macro_f1 {
            mean(&pool.per_sample_f1)
        } else {
            f1_from_counts(pool.tp, pool.fp, pool.fn_)
        };
        let precision = if pool.tp + pool.fp == 0 {
            None
        } else {
            Some(pool.tp as f64 / (pool.tp + pool.fp) as f64)
        };
        let recall = if pool.tp + pool.fn_ == 0 {
            None
        } else {
            Some(pool.tp as f64 / (pool.tp + pool.fn_) as f64)
        };
        let micro = |metric: &str, value: Option<f64>| ReportRow {
            classification: MICRO_CLASS.to_string(),
            metric: format!("{prefix} {metric}"),
            value,
        };
        rows.push(micro("F1", f1));
        rows.push(micro("Prec.", precision));
        rows.push(micro("Recall", recall));
        if cat.scores_hp() {
            rows.push(micro("HP(%) MAE", mean(&pool.hp_errors)));
        }
        if cat.scores_energy() {
            rows.push(micro("Energy(%) MAE", mean(&pool.energy_errors)));
        }
    }

    // AWD time series, binned on ground-truth game time.
    let mut bins: std::collections::BTreeMap<(u32, usize), (f64, usize)> =
        std::collections::BTreeMap::new();
    for sample in per_sample {
        let bin = sample.game_time_s / cfg.time_bin_s * cfg.time_bin_s;
        for (idx, slot) in categories.iter().enumerate() {
            let cat = sample
                .categories
                .iter()
                .find(|c| c.category == *slot)
                .expect("evaluate_sample fills every category");
            let entry = bins.entry((bin, idx)).or_insert((0.0, 0));
            entry.0 += cat.awd;
            entry.1 += 1;
        }
    }
    let time_series = bins
        .into_iter()
        .map(|((bin, idx), (sum, count))| TimeSeriesPoint {
            bin_start_s: bin,
            category: categories[idx].awd_row_name().to_string(),
            mean_awd: sum / count as f64,
        })
        .collect();

    Ok(EvalReport {
        samples: per_sample.len(),
        rows,
        self_awd,
        enemy_awd,
        alerts_vacuous,
        upgrades_vacuous,
        workers_source: "supply_workers".to_string(),
        time_series,
    })
}

/// Writes the report as pretty-printed JSON.
pub fn write_report_json(report: &EvalReport, writer: impl Write) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(writer, report)
}

/// Writes the metric table as CSV with columns
/// `classification,metric,value`; absent values render as empty cells.
pub fn write_report_csv(report: &EvalReport, writer: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["classification", "metric", "value"])?;
    for row in &report.rows {
        let value = row.value.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([row.classification.as_str(), row.metric.as_str(), value.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the AWD time series as CSV with columns
/// `bin_start_s,category,mean_awd`.
pub fn write_time_series_csv(report: &EvalReport, writer: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin_start_s", "category", "mean_awd"])?;
    for point in &report.time_series {
        w.write_record([
            point.bin_start_s.to_string().as_str(),
            point.category.as_str(),
            point.mean_awd.to_string().as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
