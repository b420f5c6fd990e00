//! Canonical in-memory model of a StarCraft II player-view observation and a
//! bidirectional codec to/from its structured textual format.
//!
//! An observation is five sections, always in this order:
//!
//! ```text
//! [Info]          economy, supply, alerts, upgrades
//! [Queue]         production / construction / research tasks in progress
//! [My Units]      own workers (aggregated + loose) and army
//! [My Structures] own buildings
//! [Visible Hostiles]  enemy units, enemy structures, fog snapshots
//! ```
//!
//! The codec round-trips: `parse_observation(serialize_observation(o)) == o`
//! for every observation in canonical form, and `serialize(parse(t)) == t`
//! for canonical fixture text. Parsing is total: every input yields either an
//! observation or one structured [`ParseError`]; nothing is silently dropped.

mod action;
mod error;
mod parse;
mod serialize;
pub mod jsonl;
pub mod testing;
mod trajectory;
mod types;

pub use action::{parse_action_line, parse_actions, serialize_action, Target, TimedAction};
pub use error::ParseError;
pub use parse::parse_observation;
pub use serialize::serialize_observation;
pub use trajectory::{TrajectoryMeta, TrajectoryRecord};
pub use types::{
    is_worker_kind, Entity, Observation, QueueEntry, Race, SnapshotEntity, WorkerSummary,
    DEFAULT_MAP_SIZE, SUPPLY_CAP_MAX,
};
