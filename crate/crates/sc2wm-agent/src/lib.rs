//! Generate-Simulate-Refine decision loop. A policy proposes actions, a
//! world-model predictor forecasts their consequences, and the policy
//! refines its proposal against that predicted future. Episodes run
//! against pluggable environments and produce match logs that the online
//! metrics consume.

mod env;
mod episode;
mod policy;
mod step;

use thiserror::Error;

pub use env::{Environment, ReplayEnv, RuleSimEnv, StepReport};
pub use episode::{
    read_match_logs, run_episode, write_match_logs, IssuedAction, MatchLog, MatchResult,
    SecondTelemetry,
};
pub use policy::{Policy, PolicyError, RefineContext, Refiner, ScriptedPolicy};
pub use step::{
    actions_equivalent, gsr_step, render_refine_context, AblationMode, AgentConfig,
    AgentStepRecord, PhaseLatency, REFINE_TEMPLATE, SELF_REFLECTION_TEMPLATE,
};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("policy failure: {0}")]
    Policy(#[from] PolicyError),
    #[error("environment failure: {0}")]
    Env(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o failure: {0}")]
    Io(String),
}
