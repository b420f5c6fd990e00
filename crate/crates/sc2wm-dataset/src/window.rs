use serde::{Deserialize, Serialize};

use sc2wm_obs::{
    parse_action_line, parse_observation, serialize_observation, Observation, TimedAction,
    TrajectoryRecord,
};

use crate::error::DatasetError;

/// One dynamics-prediction sample: observation, the actions of the next
/// `horizon_s` seconds, and the observation those actions lead to.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsSample {
    pub trajectory_id: String,
    pub t_start_s: u32,
    pub horizon_s: u32,
    pub start_obs: Observation,
    /// Offsets rebased to the window: deciseconds in (0, horizon_s * 10].
    pub actions: Vec<TimedAction>,
    pub target_obs: Observation,
}

/// Wire form: observations as canonical text, actions as canonical lines,
/// same as trajectory records.
#[derive(Serialize, Deserialize)]
struct SampleFile {
    trajectory_id: String,
    t_start_s: u32,
    horizon_s: u32,
    start_obs: String,
    actions: Vec<String>,
    target_obs: String,
}

impl DynamicsSample {
    pub fn validate(&self) -> Result<(), String> {
        if self.horizon_s == 0 {
            return Err("horizon_s must be >= 1".to_string());
        }
        if self.target_obs.time_s != self.start_obs.time_s + self.horizon_s {
            return Err(format!(
                "target time {} != start time {} + horizon {}",
                self.target_obs.time_s, self.start_obs.time_s, self.horizon_s
            ));
        }
        for a in &self.actions {
            if a.t_offset_ds > self.horizon_s * 10 {
                return Err(format!("action offset outside window: [{a}]"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = SampleFile {
            trajectory_id: self.trajectory_id.clone(),
            t_start_s: self.t_start_s,
            horizon_s: self.horizon_s,
            start_obs: serialize_observation(&self.start_obs),
            actions: self.actions.iter().map(|a| a.to_string()).collect(),
            target_obs: serialize_observation(&self.target_obs),
        };
        serde_json::to_string(&file).expect("sample serializes")
    }

    pub fn from_json(line: &str) -> Result<DynamicsSample, DatasetError> {
        let file: SampleFile = serde_json::from_str(line)
            .map_err(|e| DatasetError::Invalid(format!("sample record: {e}")))?;
        let bad = |detail: String| DatasetError::BadRecord {
            trajectory_id: file.trajectory_id.clone(),
            t_s: file.t_start_s,
            detail,
        };
        let start_obs = parse_observation(&file.start_obs).map_err(|e| bad(e.to_string()))?;
        let target_obs = parse_observation(&file.target_obs).map_err(|e| bad(e.to_string()))?;
        let actions = file
            .actions
            .iter()
            .enumerate()
            .map(|(i, line)| parse_action_line(line, i + 1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(e.to_string()))?;
        let sample = DynamicsSample {
            trajectory_id: file.trajectory_id,
            t_start_s: file.t_start_s,
            horizon_s: file.horizon_s,
            start_obs,
            actions,
            target_obs,
        };
        sample.validate().map_err(DatasetError::Invalid)?;
        Ok(sample)
    }
}

/// Cuts sliding windows out of one 1 Hz trajectory.
///
/// A window starts at every `step_s`-th record whose start plus horizon still
/// lands inside the trajectory, so a span of `T` seconds yields
/// `floor((T - horizon) / step) + 1` windows (zero when `T < horizon`).
/// Actions are gathered from the records in `(t_start, t_start + horizon]`
/// and rebased onto window-relative offsets.
pub fn build_windows(
    records: &[TrajectoryRecord],
    horizon_s: u32,
    step_s: u32,
) -> Result<Vec<DynamicsSample>, DatasetError> {
    if horizon_s == 0 || step_s == 0 {
        return Err(DatasetError::Invalid(
            "horizon_s and step_s must be >= 1".to_string(),
        ));
    }
    if records.is_empty() {
        return Ok(Vec::new());
    }
    let trajectory_id = records[0].meta.trajectory_id.clone();
    for pair in records.windows(2) {
        if pair[1].t_s != pair[0].t_s + 1 {
            return Err(DatasetError::GapInTrajectory {
                trajectory_id,
                prev_t: pair[0].t_s,
                next_t: pair[1].t_s,
            });
        }
    }

    let mut observations = Vec::with_capacity(records.len());
    let mut actions = Vec::with_capacity(records.len());
    for record in records {
        let bad = |detail: String| DatasetError::BadRecord {
            trajectory_id: record.meta.trajectory_id.clone(),
            t_s: record.t_s,
            detail,
        };
        let obs = parse_observation(&record.obs_text).map_err(|e| bad(e.to_string()))?;
        if obs.time_s != record.t_s {
            return Err(bad(format!(
                "record timestamp {} disagrees with observation time {}",
                record.t_s, obs.time_s
            )));
        }
        let parsed: Vec<TimedAction> = record
            .actions
            .iter()
            .enumerate()
            .map(|(i, line)| parse_action_line(line, i + 1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(e.to_string()))?;
        for a in &parsed {
            if a.t_offset_ds == 0 || a.t_offset_ds > 10 {
                return Err(bad(format!("record-local action offset outside (0, 1]: [{a}]")));
            }
        }
        observations.push(obs);
        actions.push(parsed);
    }

    let horizon = horizon_s as usize;
    let mut samples = Vec::new();
    let mut i = 0;
    while i + horizon < records.len() {
        let mut window_actions = Vec::new();
        for k in 1..=horizon {
            for a in &actions[i + k] {
                window_actions.push(a.shifted_s(k as u32 - 1));
            }
        }
        let sample = DynamicsSample {
            trajectory_id: records[i].meta.trajectory_id.clone(),
            t_start_s: records[i].t_s,
            horizon_s,
            start_obs: observations[i].clone(),
            actions: window_actions,
            target_obs: observations[i + horizon].clone(),
        };
        debug_assert_eq!(sample.validate(), Ok(()));
        samples.push(sample);
        i += step_s as usize;
    }
    Ok(samples)
}
