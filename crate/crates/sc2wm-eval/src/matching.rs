use std::collections::HashMap;

use sc2wm_assignment::{hungarian_solve, CostMatrix};
use sc2wm_obs::{Entity, SnapshotEntity};

/// Outcome of matching a predicted entity list against ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    /// Matched `(gt_index, pred_index)` pairs, sorted by gt index.
    pub pairs: Vec<(usize, usize)>,
    /// Ground-truth indices with no match (false negatives), sorted.
    pub unmatched_gt: Vec<usize>,
    /// Prediction indices with no match (false positives), sorted.
    pub unmatched_pred: Vec<usize>,
}

impl MatchResult {
    pub fn tp(&self) -> u64 {
        self.pairs.len() as u64
    }
    pub fn fp(&self) -> u64 {
        self.unmatched_pred.len() as u64
    }
    pub fn fn_(&self) -> u64 {
        self.unmatched_gt.len() as u64
    }
}

fn distance(a: (i32, i32), b: (i32, i32)) -> f64 {
    let dx = (a.0 - b.0) as f64;
    let dy = (a.1 - b.1) as f64;
    (dx * dx + dy * dy).sqrt()
}

/// Hybrid two-pass entity matching.
///
/// Pass 1 anchors on identity: a gt and a pred entity with the same tag ID
/// are matched (kind equality is additionally required when `strict_id_kind`
/// is set). Pass 2 anchors on space: remaining same-kind pairs within
/// `delta` map units are matched greedily in ascending-distance order, ties
/// broken by lowest gt index, then lowest pred index. Matching is one-to-one;
/// leftovers become false positives and false negatives.
pub fn match_entities(
    gt: &[Entity],
    pred: &[Entity],
    delta: f64,
    strict_id_kind: bool,
) -> MatchResult {
    let mut gt_free = vec![true; gt.len()];
    let mut pred_free = vec![true; pred.len()];
    let mut pairs = Vec::new();

    let mut pred_by_id: HashMap<u32, usize> = HashMap::new();
    for (j, p) in pred.iter().enumerate() {
        // Valid observations carry unique IDs per list; if duplicates appear
        // in raw predictions, keep the first.
        pred_by_id.entry(p.id).or_insert(j);
    }
    for (i, g) in gt.iter().enumerate() {
        if let Some(&j) = pred_by_id.get(&g.id) {
            if pred_free[j] && (!strict_id_kind || g.kind == pred[j].kind) {
                gt_free[i] = false;
                pred_free[j] = false;
                pairs.push((i, j));
            }
        }
    }

    spatial_pass(
        &mut pairs,
        &mut gt_free,
        &mut pred_free,
        delta,
        |i, j| gt[i].kind == pred[j].kind,
        |i, j| distance(gt[i].pos, pred[j].pos),
    );

    finish(pairs, &gt_free, &pred_free)
}

/// Spatial-only matching for snapshot entities, which carry no ID.
pub fn match_snapshots(gt: &[SnapshotEntity], pred: &[SnapshotEntity], delta: f64) -> MatchResult {
    let mut gt_free = vec![true; gt.len()];
    let mut pred_free = vec![true; pred.len()];
    let mut pairs = Vec::new();
    spatial_pass(
        &mut pairs,
        &mut gt_free,
        &mut pred_free,
        delta,
        |i, j| gt[i].kind == pred[j].kind,
        |i, j| distance(gt[i].pos, pred[j].pos),
    );
    finish(pairs, &gt_free, &pred_free)
}

fn spatial_pass(
    pairs: &mut Vec<(usize, usize)>,
    gt_free: &mut [bool],
    pred_free: &mut [bool],
    delta: f64,
    same_kind: impl Fn(usize, usize) -> bool,
    dist: impl Fn(usize, usize) -> f64,
) {
    let mut candidates = Vec::new();
    for i in 0..gt_free.len() {
        if !gt_free[i] {
            continue;
        }
        for j in 0..pred_free.len() {
            if !pred_free[j] || !same_kind(i, j) {
                continue;
            }
            let d = dist(i, j);
            if d <= delta {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("distances are finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    for (_, i, j) in candidates {
        if gt_free[i] && pred_free[j] {
            gt_free[i] = false;
            pred_free[j] = false;
            pairs.push((i, j));
        }
    }
}

fn finish(mut pairs: Vec<(usize, usize)>, gt_free: &[bool], pred_free: &[bool]) -> MatchResult {
    pairs.sort_unstable();
    let unmatched_gt = (0..gt_free.len()).filter(|&i| gt_free[i]).collect();
    let unmatched_pred = (0..pred_free.len()).filter(|&j| pred_free[j]).collect();
    MatchResult { pairs, unmatched_gt, unmatched_pred }
}

/// Like [`match_entities`], but the spatial pass maximizes the number of
/// matched pairs (minimum total distance among maximum matchings) instead of
/// matching greedily. Exact but quadratic in set size; intended for small
/// instances and for auditing the greedy pass.
pub fn match_entities_optimal(
    gt: &[Entity],
    pred: &[Entity],
    delta: f64,
    strict_id_kind: bool,
) -> MatchResult {
    let mut gt_free = vec![true; gt.len()];
    let mut pred_free = vec![true; pred.len()];
    let mut pairs = Vec::new();

    let mut pred_by_id: HashMap<u32, usize> = HashMap::new();
    for (j, p) in pred.iter().enumerate() {
        pred_by_id.entry(p.id).or_insert(j);
    }
    for (i, g) in gt.iter().enumerate() {
        if let Some(&j) = pred_by_id.get(&g.id) {
            if pred_free[j] && (!strict_id_kind || g.kind == pred[j].kind) {
                gt_free[i] = false;
                pred_free[j] = false;
                pairs.push((i, j));
            }
        }
    }

    let rest_gt: Vec<usize> = (0..gt.len()).filter(|&i| gt_free[i]).collect();
    let rest_pred: Vec<usize> = (0..pred.len()).filter(|&j| pred_free[j]).collect();
    let m = rest_gt.len();
    let n = rest_pred.len();
    if m > 0 && n > 0 {
        // Augmented assignment where leaving a pair unmatched costs more than
        // any chain of in-threshold matches, so cardinality dominates.
        let penalty = delta * (m + n) as f64 + 1.0;
        let mut cost = CostMatrix::new(m + n);
        for (a, &i) in rest_gt.iter().enumerate() {
            for (b, &j) in rest_pred.iter().enumerate() {
                let d = distance(gt[i].pos, pred[j].pos);
                if gt[i].kind == pred[j].kind && d <= delta {
                    cost.set(a, b, d).expect("distance is finite");
                } else {
                    cost.set_forbidden(a, b);
                }
            }
            for k in 0..m {
                if k == a {
                    cost.set(a, n + k, penalty).expect("penalty is finite");
                } else {
                    cost.set_forbidden(a, n + k);
                }
            }
        }
        for b in 0..n {
            for k in 0..n {
                if k == b {
                    cost.set(m + b, k, penalty).expect("penalty is finite");
                } else {
                    cost.set_forbidden(m + b, k);
                }
            }
        }
        let (assignment, _) =
            hungarian_solve(&cost).expect("augmented matrix admits the all-unmatched assignment");
        for (a, &i) in rest_gt.iter().enumerate() {
            let b = assignment[a];
            if b < n {
                let j = rest_pred[b];
                gt_free[i] = false;
                pred_free[j] = false;
                pairs.push((i, j));
            }
        }
    }

    finish(pairs, &gt_free, &pred_free)
}
