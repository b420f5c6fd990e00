use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use sc2wm_obs::TrajectoryRecord;

use crate::error::DatasetError;
use crate::render::{render_world_model_prompt, RenderConfig};
use crate::split::{split_trajectories, SplitManifest};
use crate::window::{build_windows, DynamicsSample};

/// One chat turn in the training-record wire format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// One training record: `{"messages": [user, assistant]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRecord {
    pub messages: Vec<ChatMessage>,
}

pub fn chat_record(sample: &DynamicsSample, player_id: u32, cfg: &RenderConfig) -> ChatRecord {
    let (user, assistant) = render_world_model_prompt(sample, player_id, cfg);
    ChatRecord {
        messages: vec![
            ChatMessage { role: "user".to_string(), content: user },
            ChatMessage { role: "assistant".to_string(), content: assistant },
        ],
    }
}

/// Sidecar metadata for one emitted sample, in file order, for joining
/// predictions back to windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub split: String,
    pub line: usize,
    pub trajectory_id: String,
    pub t_start_s: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub seed: u64,
    pub horizon_s: u32,
    pub step_s: u32,
    pub ratios: (u32, u32, u32),
    pub split: SplitManifest,
    pub counts: BTreeMap<String, usize>,
    pub entries: Vec<ManifestEntry>,
}

/// The built dataset: per-split samples plus the manifest describing them.
pub struct BuiltDataset {
    pub train: Vec<DynamicsSample>,
    pub valid: Vec<DynamicsSample>,
    pub test: Vec<DynamicsSample>,
    pub manifest: DatasetManifest,
}

impl BuiltDataset {
    pub fn split_samples(&self, split: &str) -> &[DynamicsSample] {
        match split {
            "train" => &self.train,
            "valid" => &self.valid,
            "test" => &self.test,
            other => panic!("unknown split {other:?}"),
        }
    }
}

/// Windows every trajectory, splits at trajectory level, and groups samples
/// by split. Trajectories keep their sorted-id order inside each split, and
/// windows keep time order inside each trajectory, so output is reproducible
/// line for line.
pub fn build_dataset(
    trajectories: &[Vec<TrajectoryRecord>],
    horizon_s: u32,
    step_s: u32,
    ratios: (u32, u32, u32),
    seed: u64,
) -> Result<BuiltDataset, DatasetError> {
    let mut by_id: BTreeMap<String, Vec<DynamicsSample>> = BTreeMap::new();
    for records in trajectories {
        if records.is_empty() {
            continue;
        }
        let id = records[0].meta.trajectory_id.clone();
        if by_id.contains_key(&id) {
            return Err(DatasetError::Invalid(format!("duplicate trajectory id {id:?}")));
        }
        by_id.insert(id, build_windows(records, horizon_s, step_s)?);
    }
    let ids: Vec<String> = by_id.keys().cloned().collect();
    let split = split_trajectories(&ids, ratios, seed)?;

    let mut out = BuiltDataset {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
        manifest: DatasetManifest {
            seed,
            horizon_s,
            step_s,
            ratios,
            split: split.clone(),
            counts: BTreeMap::new(),
            entries: Vec::new(),
        },
    };
    for (name, ids) in [("train", &split.train), ("valid", &split.valid), ("test", &split.test)] {
        let bucket: &mut Vec<DynamicsSample> = match name {
            "train" => &mut out.train,
            "valid" => &mut out.valid,
            _ => &mut out.test,
        };
        for id in ids {
            for sample in &by_id[id] {
                out.manifest.entries.push(ManifestEntry {
                    split: name.to_string(),
                    line: bucket.len() + 1,
                    trajectory_id: sample.trajectory_id.clone(),
                    t_start_s: sample.t_start_s,
                });
                bucket.push(sample.clone());
            }
        }
        out.manifest.counts.insert(name.to_string(), bucket.len());
    }
    Ok(out)
}

/// Writes samples as chat-record JSON Lines.
pub fn write_chat_records(
    mut w: impl Write,
    samples: &[DynamicsSample],
    player_id: u32,
    cfg: &RenderConfig,
) -> Result<(), DatasetError> {
    for sample in samples {
        let record = chat_record(sample, player_id, cfg);
        let line = serde_json::to_string(&record).map_err(|e| DatasetError::Io(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| DatasetError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Writes samples in the window wire format consumed by predictors.
pub fn write_windows(mut w: impl Write, samples: &[DynamicsSample]) -> Result<(), DatasetError> {
    for sample in samples {
        writeln!(w, "{}", sample.to_json()).map_err(|e| DatasetError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Reads a windows JSON Lines stream back into samples.
pub fn read_windows(r: impl Read) -> Result<Vec<DynamicsSample>, DatasetError> {
    let mut samples = Vec::new();
    for (no, line) in BufReader::new(r).lines().enumerate() {
        let line = line.map_err(|e| DatasetError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        samples.push(
            DynamicsSample::from_json(&line)
                .map_err(|e| DatasetError::Invalid(format!("line {}: {e}", no + 1)))?,
        );
    }
    Ok(samples)
}

/// Reads trajectory records grouped into runs of equal trajectory id.
pub fn read_trajectories(r: impl Read) -> Result<Vec<Vec<TrajectoryRecord>>, DatasetError> {
    let mut groups: Vec<Vec<TrajectoryRecord>> = Vec::new();
    for (no, line) in BufReader::new(r).lines().enumerate() {
        let line = line.map_err(|e| DatasetError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TrajectoryRecord = serde_json::from_str(&line)
            .map_err(|e| DatasetError::Invalid(format!("line {}: {e}", no + 1)))?;
        match groups.last_mut() {
            Some(group)
                if group[0].meta.trajectory_id == record.meta.trajectory_id =>
            {
                group.push(record)
            }
            _ => groups.push(vec![record]),
        }
    }
    Ok(groups)
}
