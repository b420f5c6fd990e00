//! Deterministic action-conditioned forward simulator.
//!
//! [`simulate`] advances an observation by whole seconds under a list of
//! timed actions, applying the nine mechanics rules the world model is
//! prompted with: time, resources, supply, queue progress, movement, status,
//! combat, visibility, and the frame condition that untouched entities stay
//! bit-identical. Multi-second steps are chains of one-second substeps, so
//! `simulate(o, a, 5)` equals five chained one-second calls by construction.
//!
//! Not a game engine: no pathfinding, collision, abilities, or armor. The
//! fidelity target is the prompt's rule list, nothing more.

mod scenario;
mod sim;
mod spec;

pub use scenario::{generate_trajectory, scenarios, ScriptedScenario};
pub use sim::{simulate, simulate_logged, ActionOutcome, SimError, SimEvent, SimOutcome};
pub use spec::{SimConfig, UnitSpec, UnitTable};
