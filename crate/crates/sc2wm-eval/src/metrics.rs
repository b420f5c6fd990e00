use std::collections::{BTreeMap, BTreeSet};

use sc2wm_obs::QueueEntry;

use crate::error::EvalError;

/// Symmetric Mean Absolute Percentage Error over two equal-length series:
/// the mean of `|y - p| / ((|y| + |p|) / 2 + epsilon)`. Bounded in `[0, 2]`.
pub fn smape(truth: &[f64], pred: &[f64], epsilon: f64) -> Result<f64, EvalError> {
    if truth.len() != pred.len() {
        return Err(EvalError::LengthMismatch { truth: truth.len(), pred: pred.len() });
    }
    if truth.is_empty() {
        return Err(EvalError::LengthMismatch { truth: 0, pred: 0 });
    }
    let sum: f64 = truth
        .iter()
        .zip(pred)
        .map(|(&y, &p)| smape_term(y, p, epsilon))
        .sum();
    Ok(sum / truth.len() as f64)
}

/// A single SMAPE term for one (truth, prediction) pair.
pub fn smape_term(truth: f64, pred: f64, epsilon: f64) -> f64 {
    (truth - pred).abs() / ((truth.abs() + pred.abs()) / 2.0 + epsilon)
}

/// Result of an active-frame F1 computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveF1 {
    pub f1: f64,
    /// True when no frame was active, making the 1.0 score vacuous.
    pub vacuous: bool,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

/// Micro-averaged F1 over set-valued frames, restricted to frames where the
/// truth or the prediction is nonempty. With no active frames the score is a
/// vacuous 1.0, flagged as such.
pub fn active_frame_f1(
    truth_sets: &[BTreeSet<String>],
    pred_sets: &[BTreeSet<String>],
) -> Result<ActiveF1, EvalError> {
    if truth_sets.len() != pred_sets.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth_sets.len(),
            pred: pred_sets.len(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    let mut any_active = false;
    for (t, p) in truth_sets.iter().zip(pred_sets) {
        if t.is_empty() && p.is_empty() {
            continue;
        }
        any_active = true;
        tp += t.intersection(p).count() as u64;
        fp += p.difference(t).count() as u64;
        fn_ += t.difference(p).count() as u64;
    }
    if !any_active {
        return Ok(ActiveF1 { f1: 1.0, vacuous: true, tp: 0, fp: 0, fn_: 0 });
    }
    Ok(ActiveF1 { f1: f1_from_counts(tp, fp, fn_).unwrap_or(0.0), vacuous: false, tp, fp, fn_ })
}

/// `2 TP / (2 TP + FP + FN)`, or `None` when the denominator is zero.
pub fn f1_from_counts(tp: u64, fp: u64, fn_: u64) -> Option<f64> {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        None
    } else {
        Some(2.0 * tp as f64 / denom as f64)
    }
}

/// Queue comparison result.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueScore {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    /// F1 over queue entries matched as a multiset on `(owner_id, task)`.
    pub f1: f64,
    /// Absolute progress errors, in percentage points, one per matched pair.
    pub progress_abs_errors: Vec<f64>,
}

impl QueueScore {
    /// Mean absolute progress error; `None` when nothing matched.
    pub fn progress_mae(&self) -> Option<f64> {
        if self.progress_abs_errors.is_empty() {
            None
        } else {
            Some(self.progress_abs_errors.iter().sum::<f64>() / self.progress_abs_errors.len() as f64)
        }
    }
}

/// Scores a predicted queue against the truth.
///
/// Entries are matched as a multiset on the key `(owner_id, task)`. Within a
/// key, progress values are paired in ascending order on both sides, which
/// minimizes the total absolute error among positional pairings.
pub fn queue_metrics(truth: &[QueueEntry], pred: &[QueueEntry]) -> QueueScore {
    let key = |q: &QueueEntry| (q.owner_id, q.task.clone());
    let mut truth_by_key: BTreeMap<(u32, String), Vec<u32>> = BTreeMap::new();
    for q in truth {
        truth_by_key.entry(key(q)).or_default().push(q.progress_pct);
    }
    let mut pred_by_key: BTreeMap<(u32, String), Vec<u32>> = BTreeMap::new();
    for q in pred {
        pred_by_key.entry(key(q)).or_default().push(q.progress_pct);
    }

    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    let mut errors = Vec::new();
    for (k, truth_progress) in &mut truth_by_key {
        let mut pred_progress = pred_by_key.remove(k).unwrap_or_default();
        truth_progress.sort_unstable();
        pred_progress.sort_unstable();
        let matched = truth_progress.len().min(pred_progress.len());
        tp += matched as u64;
        fn_ += (truth_progress.len() - matched) as u64;
        fp += (pred_progress.len() - matched) as u64;
        for i in 0..matched {
            errors.push((truth_progress[i] as f64 - pred_progress[i] as f64).abs());
        }
    }
    for leftover in pred_by_key.values() {
        fp += leftover.len() as u64;
    }

    let f1 = if tp + fp + fn_ == 0 {
        1.0
    } else {
        f1_from_counts(tp, fp, fn_).unwrap_or(0.0)
    };
    QueueScore { tp, fp, fn_, f1, progress_abs_errors: errors }
}
