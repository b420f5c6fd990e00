//! Offline evaluation of predicted observations against ground truth.
//!
//! Four dimensions are scored per `(prediction, truth)` pair:
//!
//! 1. **Macro-situation consistency**: an assignment-based distance (AWD) per
//!    entity category.
//! 2. **Economy and status**: SMAPE over the scalar Info fields plus
//!    active-frame F1 for alerts and upgrades.
//! 3. **Development**: build/train queue F1 and progress MAE.
//! 4. **Micro entity attributes**: hybrid ID/spatial entity matching with
//!    precision, recall, F1, and HP/energy MAE per category.
//!
//! [`evaluate_sample`] scores one pair and [`aggregate`] pools a corpus of
//! sample evaluations into an [`EvalReport`] whose rows carry fixed,
//! stable metric names.

mod config;
mod error;
mod matching;
mod metrics;
mod report;
mod sample;

pub use config::{EntityCategory, EvalConfig, ScalarField};
pub use error::EvalError;
pub use matching::{match_entities, match_entities_optimal, match_snapshots, MatchResult};
pub use metrics::{active_frame_f1, queue_metrics, smape, ActiveF1, QueueScore};
pub use report::{
    aggregate, write_report_csv, write_report_json, write_time_series_csv, EvalReport, ReportRow,
    TimeSeriesPoint,
};
pub use sample::{evaluate_sample, CategoryEval, QueueEval, SampleEval, ScalarTerm, SetTriple};
