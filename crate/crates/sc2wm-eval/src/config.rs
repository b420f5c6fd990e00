use serde::{Deserialize, Serialize};

use sc2wm_obs::Observation;

/// Scored scalar fields from the Info section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarField {
    Minerals,
    MineralsRate,
    Gas,
    GasRate,
    SupplyUsed,
    SupplyCap,
    WorkersNum,
}

impl ScalarField {
    /// All fields in report order.
    pub fn all() -> Vec<ScalarField> {
        use ScalarField::*;
        vec![Minerals, MineralsRate, Gas, GasRate, SupplyUsed, SupplyCap, WorkersNum]
    }

    /// Report row name, `"<name> SMAPE"`.
    pub fn row_name(&self) -> &'static str {
        match self {
            ScalarField::Minerals => "Minerals SMAPE",
            ScalarField::MineralsRate => "Minerals Rate SMAPE",
            ScalarField::Gas => "Gas SMAPE",
            ScalarField::GasRate => "Gas Rate SMAPE",
            ScalarField::SupplyUsed => "Supply Used SMAPE",
            ScalarField::SupplyCap => "Supply Cap SMAPE",
            ScalarField::WorkersNum => "Workers num SMAPE",
        }
    }

    /// Extracts the field value from an observation. Worker count reads the
    /// supply breakdown's worker figure, which covers mining, mule, and loose
    /// workers alike.
    pub fn value(&self, obs: &Observation) -> f64 {
        let v = match self {
            ScalarField::Minerals => obs.minerals,
            ScalarField::MineralsRate => obs.minerals_rate,
            ScalarField::Gas => obs.gas,
            ScalarField::GasRate => obs.gas_rate,
            ScalarField::SupplyUsed => obs.supply_used,
            ScalarField::SupplyCap => obs.supply_cap,
            ScalarField::WorkersNum => obs.supply_workers,
        };
        v as f64
    }
}

/// Entity categories scored for matching and AWD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityCategory {
    SelfUnit,
    SelfStruct,
    EnemyUnit,
    EnemyStruct,
    SnapshotEnemyStruct,
}

impl EntityCategory {
    /// All categories in report order.
    pub fn all() -> [EntityCategory; 5] {
        [
            EntityCategory::SelfUnit,
            EntityCategory::SelfStruct,
            EntityCategory::EnemyUnit,
            EntityCategory::EnemyStruct,
            EntityCategory::SnapshotEnemyStruct,
        ]
    }

    /// Row name of the category's AWD metric.
    pub fn awd_row_name(&self) -> &'static str {
        match self {
            EntityCategory::SelfUnit => "Self Unit AWD",
            EntityCategory::SelfStruct => "Self Struct AWD",
            EntityCategory::EnemyUnit => "Enemy Unit AWD",
            EntityCategory::EnemyStruct => "Enemy Struct AWD",
            EntityCategory::SnapshotEnemyStruct => "Snapshot Enemy Struct AWD",
        }
    }

    /// Prefix of the category's micro-entity rows.
    pub fn micro_prefix(&self) -> &'static str {
        match self {
            EntityCategory::SelfUnit => "Self Unit",
            EntityCategory::SelfStruct => "Self Struct",
            EntityCategory::EnemyUnit => "Enemy Unit",
            EntityCategory::EnemyStruct => "Enemy Struct",
            EntityCategory::SnapshotEnemyStruct => "Snap Enemy Struct",
        }
    }

    /// Whether the report carries a HP MAE row for this category.
    pub fn scores_hp(&self) -> bool {
        !matches!(self, EntityCategory::SnapshotEnemyStruct)
    }

    /// Whether the report carries an energy MAE row for this category.
    pub fn scores_energy(&self) -> bool {
        matches!(
            self,
            EntityCategory::SelfUnit | EntityCategory::SelfStruct | EntityCategory::EnemyUnit
        )
    }

    /// True for the two own-side categories; the rest are enemy-side.
    pub fn is_self_side(&self) -> bool {
        matches!(self, EntityCategory::SelfUnit | EntityCategory::SelfStruct)
    }
}

/// Evaluation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// SMAPE stabilizer added to the denominator.
    pub epsilon: f64,
    /// Spatial matching threshold in map units.
    pub delta: f64,
    /// AWD miss/hallucination penalty.
    pub lambda: f64,
    /// Scalar fields to score, in report order.
    pub scalar_fields: Vec<ScalarField>,
    /// Bin width for the AWD time series, in game seconds.
    pub time_bin_s: u32,
    /// Require kind equality in the ID matching pass.
    pub strict_id_kind: bool,
    /// Average per-sample F1 values instead of pooling TP/FP/FN.
    pub macro_f1: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            epsilon: 1e-8,
            delta: 10.0,
            lambda: 90.5,
            scalar_fields: ScalarField::all(),
            time_bin_s: 30,
            strict_id_kind: false,
            macro_f1: false,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.epsilon > 0.0) {
            return Err(format!("epsilon must be > 0, got {}", self.epsilon));
        }
        if !(self.delta > 0.0) {
            return Err(format!("delta must be > 0, got {}", self.delta));
        }
        if !(self.lambda > 0.0) {
            return Err(format!("lambda must be > 0, got {}", self.lambda));
        }
        if self.scalar_fields.is_empty() {
            return Err("scalar_fields must be nonempty".to_string());
        }
        if self.time_bin_s == 0 {
            return Err("time_bin_s must be > 0".to_string());
        }
        Ok(())
    }
}
