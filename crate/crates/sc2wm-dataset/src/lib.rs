//! Dynamics-prediction dataset builder: sliding windows over 1 Hz trajectory
//! logs, trajectory-level train/valid/test splits, and bit-exact prompt
//! rendering into chat-format JSON Lines.
//!
//! A sample pairs `(o_t, a_(t, t+h])` with `o_(t+h)`. Windows slide by a
//! fixed step; splits are cut at trajectory granularity so near-duplicate
//! windows never straddle a split boundary; rendering is deterministic and
//! tested byte-for-byte against golden files.

mod error;
mod output;
mod render;
mod split;
mod window;

pub use error::DatasetError;
pub use output::{
    build_dataset, chat_record, read_trajectories, read_windows, write_chat_records,
    write_windows, BuiltDataset, ChatMessage, ChatRecord, DatasetManifest, ManifestEntry,
};
pub use render::{
    has_residual_placeholder, render_action_section, render_world_model_prompt, RenderConfig,
    EMPTY_ACTION_MARKER, WORLD_MODEL_TEMPLATE,
};
pub use split::{split_trajectories, SplitManifest};
pub use window::{build_windows, DynamicsSample};
