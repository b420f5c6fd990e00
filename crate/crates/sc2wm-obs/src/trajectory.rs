use serde::{Deserialize, Serialize};

/// Per-trajectory metadata carried on every record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub trajectory_id: String,
    pub player_id: u32,
    #[serde(default)]
    pub map: String,
    #[serde(default)]
    pub opponent_level: u32,
    /// Final match result for the logged player ("win" / "loss" / "draw"),
    /// empty while unknown.
    #[serde(default)]
    pub result: String,
}

/// One record of a 1 Hz trajectory log.
///
/// `actions` holds the canonical action lines issued during the second
/// `(t_s - 1, t_s]`, each with a local offset in `(0.0, 1.0]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t_s: u32,
    pub obs_text: String,
    #[serde(default)]
    pub actions: Vec<String>,
    pub meta: TrajectoryMeta,
}
