use serde::{Deserialize, Serialize};

use sc2wm_assignment::{awd, TypedPoint};
use sc2wm_obs::{Entity, Observation, SnapshotEntity};

use crate::config::{EntityCategory, EvalConfig, ScalarField};
use crate::matching::{match_entities, match_snapshots, MatchResult};
use crate::metrics::{queue_metrics, smape_term};

/// One scalar field's contribution to a sample evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarTerm {
    pub field: ScalarField,
    pub truth: f64,
    pub pred: f64,
    /// SMAPE term for this pair, in `[0, 2]`.
    pub term: f64,
}

/// TP/FP/FN counts for a set-valued field on one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetTriple {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    /// False when both sides were empty in this frame.
    pub active: bool,
}

impl SetTriple {
    fn from_sets(truth: &std::collections::BTreeSet<String>, pred: &std::collections::BTreeSet<String>) -> Self {
        if truth.is_empty() && pred.is_empty() {
            return SetTriple { tp: 0, fp: 0, fn_: 0, active: false };
        }
        SetTriple {
            tp: truth.intersection(pred).count() as u64,
            fp: pred.difference(truth).count() as u64,
            fn_: truth.difference(pred).count() as u64,
            active: true,
        }
    }
}

/// Matching and distance scores for one entity category on one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryEval {
    pub category: EntityCategory,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    /// Absolute HP errors in percentage points, one per matched pair.
    pub hp_abs_errors: Vec<f64>,
    /// Absolute energy errors over matched pairs where both sides report energy.
    pub energy_abs_errors: Vec<f64>,
    /// Augmented Wasserstein Distance for the category.
    pub awd: f64,
}

/// Queue scores for one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueEval {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub progress_abs_errors: Vec<f64>,
}

/// All four evaluation dimensions for a single (prediction, truth) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEval {
    /// Game time of the ground-truth frame, for time-series bucketing.
    pub game_time_s: u32,
    pub scalars: Vec<ScalarTerm>,
    pub alerts: SetTriple,
    pub upgrades: SetTriple,
    pub queue: QueueEval,
    pub categories: Vec<CategoryEval>,
}

fn entity_points(entities: &[Entity]) -> Vec<TypedPoint> {
    entities
        .iter()
        .map(|e| TypedPoint::new(e.kind.clone(), e.pos.0 as f64, e.pos.1 as f64))
        .collect()
}

fn snapshot_points(entities: &[SnapshotEntity]) -> Vec<TypedPoint> {
    entities
        .iter()
        .map(|e| TypedPoint::new(e.kind.clone(), e.pos.0 as f64, e.pos.1 as f64))
        .collect()
}

fn category_eval(
    category: EntityCategory,
    gt: &[Entity],
    pred: &[Entity],
    cfg: &EvalConfig,
) -> CategoryEval {
    let matched = match_entities(gt, pred, cfg.delta, cfg.strict_id_kind);
    attribute_errors(category, gt, pred, &matched, cfg)
}

fn attribute_errors(
    category: EntityCategory,
    gt: &[Entity],
    pred: &[Entity],
    matched: &MatchResult,
    cfg: &EvalConfig,
) -> CategoryEval {
    let mut hp_abs_errors = Vec::new();
    let mut energy_abs_errors = Vec::new();
    for &(i, j) in &matched.pairs {
        hp_abs_errors.push((gt[i].hp_pct as f64 - pred[j].hp_pct as f64).abs());
        if let (Some(te), Some(pe)) = (gt[i].energy_pct, pred[j].energy_pct) {
            energy_abs_errors.push((te as f64 - pe as f64).abs());
        }
    }
    let distance = awd(&entity_points(gt), &entity_points(pred), cfg.lambda);
    CategoryEval {
        category,
        tp: matched.tp(),
        fp: matched.fp(),
        fn_: matched.fn_(),
        hp_abs_errors,
        energy_abs_errors,
        awd: distance.awd,
    }
}

/// Scores one predicted observation against its ground truth across all four
/// dimensions. Pure and deterministic; corpus runs may parallelize over
/// samples freely.
pub fn evaluate_sample(pred: &Observation, truth: &Observation, cfg: &EvalConfig) -> SampleEval {
    let scalars = cfg
        .scalar_fields
        .iter()
        .map(|&field| {
            let y = field.value(truth);
            let p = field.value(pred);
            ScalarTerm { field, truth: y, pred: p, term: smape_term(y, p, cfg.epsilon) }
        })
        .collect();

    let queue_score = queue_metrics(&truth.queue, &pred.queue);

    let mut categories = Vec::with_capacity(5);
    categories.push(category_eval(EntityCategory::SelfUnit, &truth.my_units, &pred.my_units, cfg));
    categories.push(category_eval(
        EntityCategory::SelfStruct,
        &truth.my_structures,
        &pred.my_structures,
        cfg,
    ));
    categories.push(category_eval(
        EntityCategory::EnemyUnit,
        &truth.enemy_units,
        &pred.enemy_units,
        cfg,
    ));
    categories.push(category_eval(
        EntityCategory::EnemyStruct,
        &truth.enemy_structures,
        &pred.enemy_structures,
        cfg,
    ));
    let snap = match_snapshots(
        &truth.snapshot_enemy_structures,
        &pred.snapshot_enemy_structures,
        cfg.delta,
    );
    let snap_awd = awd(
        &snapshot_points(&truth.snapshot_enemy_structures),
        &snapshot_points(&pred.snapshot_enemy_structures),
        cfg.lambda,
    );
    categories.push(CategoryEval {
        category: EntityCategory::SnapshotEnemyStruct,
        tp: snap.tp(),
        fp: snap.fp(),
        fn_: snap.fn_(),
        hp_abs_errors: Vec::new(),
        energy_abs_errors: Vec::new(),
        awd: snap_awd.awd,
    });

    SampleEval {
        game_time_s: truth.time_s,
        scalars,
        alerts: SetTriple::from_sets(&truth.alerts, &pred.alerts),
        upgrades: SetTriple::from_sets(&truth.upgrades, &pred.upgrades),
        queue: QueueEval {
            tp: queue_score.tp,
            fp: queue_score.fp,
            fn_: queue_score.fn_,
            progress_abs_errors: queue_score.progress_abs_errors,
        },
        categories,
    }
}
