use thiserror::Error;

use sc2wm_dataset::DynamicsSample;
use sc2wm_obs::{Observation, TimedAction};
use sc2wm_sim::SimError;

/// Inputs of one dynamics prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRequest {
    pub start_obs: Observation,
    pub actions: Vec<TimedAction>,
    pub horizon_s: u32,
    pub player_id: u32,
}

impl PredictionRequest {
    pub fn from_sample(sample: &DynamicsSample, player_id: u32) -> PredictionRequest {
        PredictionRequest {
            start_obs: sample.start_obs.clone(),
            actions: sample.actions.clone(),
            horizon_s: sample.horizon_s,
            player_id,
        }
    }

    pub fn validate(&self) -> Result<(), PredictError> {
        if self.horizon_s == 0 {
            return Err(PredictError::InvalidRequest("horizon_s must be >= 1".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    /// Connection-level failure with no HTTP response (refused, reset, DNS).
    #[error("transport failure after {attempts} attempt(s): {detail}")]
    Transport { attempts: u32, detail: String },
    #[error("endpoint returned HTTP {status} after {attempts} attempt(s)")]
    HttpError { status: u16, attempts: u32 },
    /// The endpoint replied, but no attempt produced parseable observation
    /// text; carries the last raw reply for diagnostics.
    #[error("unparseable reply after {attempts} attempt(s): {detail}")]
    UnparseableReply { attempts: u32, detail: String, raw: String },
}

/// Removes one leading `<think>...</think>` block, if present, and returns
/// the remainder with leading whitespace trimmed.
pub fn strip_think_block(text: &str) -> &str {
    let trimmed = text.trim_start();
    if let Some(rest) = trimmed.strip_prefix("<think>") {
        if let Some(end) = rest.find("</think>") {
            return rest[end + "</think>".len()..].trim_start();
        }
    }
    trimmed
}
