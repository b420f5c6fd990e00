use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    /// Trajectories must be sampled at exactly 1 Hz.
    #[error("gap in trajectory {trajectory_id}: t={prev_t} is followed by t={next_t}")]
    GapInTrajectory { trajectory_id: String, prev_t: u32, next_t: u32 },
    /// A record failed to parse; carries a locator for the first failure.
    #[error("trajectory {trajectory_id}, record t={t_s}: {detail}")]
    BadRecord { trajectory_id: String, t_s: u32, detail: String },
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(String),
}
