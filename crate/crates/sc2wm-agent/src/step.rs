use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use sc2wm_obs::{serialize_observation, Observation, Target, TimedAction};
use sc2wm_predict::{PredictionRequest, Predictor};

use crate::policy::{Policy, RefineContext};
use crate::AgentError;

/// Refinement prompt wrapped around a predicted observation. Placeholders:
/// `{delta}`, `{report}`.
pub const REFINE_TEMPLATE: &str = include_str!("../templates/refine.txt");

/// Reflection-only refinement prompt (no placeholders); used when forward
/// simulation is skipped.
pub const SELF_REFLECTION_TEMPLATE: &str = include_str!("../templates/self_reflection.txt");

/// Which phases of the loop run. `ZeroshotWm` behaves like `Full`; the
/// difference is which world model the caller wires in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationMode {
    Full,
    RefineOnly,
    ZeroshotWm,
    Generate,
}

impl AblationMode {
    pub fn simulates(self) -> bool {
        matches!(self, AblationMode::Full | AblationMode::ZeroshotWm)
    }

    pub fn refines(self) -> bool {
        !matches!(self, AblationMode::Generate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AblationMode::Full => "full",
            AblationMode::RefineOnly => "refine-only",
            AblationMode::ZeroshotWm => "zeroshot-wm",
            AblationMode::Generate => "generate",
        }
    }
}

impl FromStr for AblationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<AblationMode, String> {
        match s {
            "full" => Ok(AblationMode::Full),
            "refine-only" => Ok(AblationMode::RefineOnly),
            "zeroshot-wm" => Ok(AblationMode::ZeroshotWm),
            "generate" => Ok(AblationMode::Generate),
            other => Err(format!(
                "unknown ablation mode {other:?}; expected full, refine-only, zeroshot-wm, or generate"
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Prediction horizon passed to the world model.
    pub horizon_s: u32,
    /// Player id used when rendering world-model prompts.
    pub player_id: u32,
    pub mode: AblationMode,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig { horizon_s: 5, player_id: 1, mode: AblationMode::Full }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if self.horizon_s == 0 {
            return Err(AgentError::Invalid("horizon_s must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Wall-clock cost of each phase, in milliseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseLatency {
    pub generate_ms: f64,
    pub simulate_ms: f64,
    pub context_ms: f64,
    pub refine_ms: f64,
}

/// Full trace of one decision step.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStepRecord {
    pub t_s: u32,
    pub observation: Observation,
    pub a_init: Vec<TimedAction>,
    /// `None` when simulation was skipped or failed; see `wm_error`.
    pub predicted_obs: Option<Observation>,
    pub wm_error: Option<String>,
    /// Rendered refinement text, present iff the refine phase ran.
    pub refinement_context: Option<String>,
    pub a_refined: Vec<TimedAction>,
    /// True iff `a_refined` and `a_init` differ as action sets.
    pub revised: bool,
    pub latency: PhaseLatency,
}

/// Renders the simulation report shown to the policy during refinement.
pub fn render_refine_context(predicted: &Observation, horizon_s: u32) -> String {
    REFINE_TEMPLATE
        .replace("{delta}", &horizon_s.to_string())
        .replace("{report}", serialize_observation(predicted).trim_end())
}

fn canonical_key(a: &TimedAction) -> (String, String, u32, String) {
    let target = match &a.target {
        Target::None => String::new(),
        Target::Point(x, y) => format!("({x}, {y})"),
        Target::Entity { kind, id } => format!("{kind} [{id}]"),
    };
    (a.command.clone(), a.subject_kind.clone(), a.subject_id, target)
}

/// Action-set equality behind the `revised` flag: multisets of
/// (command, subject, target), ignoring offsets and list order.
pub fn actions_equivalent(a: &[TimedAction], b: &[TimedAction]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ka: Vec<_> = a.iter().map(canonical_key).collect();
    let mut kb: Vec<_> = b.iter().map(canonical_key).collect();
    ka.sort();
    kb.sort();
    ka == kb
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// One Generate-Simulate-Refine pass.
///
/// Phase 1 asks the policy for a proposal; phase 2 predicts its outcome
/// with the world model; phase 3 renders the refinement context around the
/// prediction; phase 4 asks the policy again. A world-model failure never
/// aborts the step: it degrades to the unrefined proposal with the error
/// noted. Policy failures do abort.
pub fn gsr_step(
    obs: &Observation,
    policy: &mut dyn Policy,
    world_model: &dyn Predictor,
    cfg: &AgentConfig,
) -> Result<AgentStepRecord, AgentError> {
    cfg.validate()?;
    let mut latency = PhaseLatency::default();

    let started = Instant::now();
    let a_init = policy.propose(obs)?;
    latency.generate_ms = ms(started);

    let mut predicted_obs = None;
    let mut wm_error = None;
    if cfg.mode.simulates() {
        let started = Instant::now();
        let req = PredictionRequest {
            start_obs: obs.clone(),
            actions: a_init.clone(),
            horizon_s: cfg.horizon_s,
            player_id: cfg.player_id,
        };
        match world_model.predict(&req) {
            Ok(pred) => predicted_obs = Some(pred),
            Err(e) => wm_error = Some(e.to_string()),
        }
        latency.simulate_ms = ms(started);
    }

    let degraded = cfg.mode.simulates() && predicted_obs.is_none();
    let mut refinement_context = None;
    let mut a_refined = a_init.clone();
    if cfg.mode.refines() && !degraded {
        let started = Instant::now();
        let text = match &predicted_obs {
            Some(pred) => render_refine_context(pred, cfg.horizon_s),
            None => SELF_REFLECTION_TEMPLATE.to_string(),
        };
        latency.context_ms = ms(started);

        let started = Instant::now();
        let ctx = RefineContext { text: &text, predicted: predicted_obs.as_ref() };
        a_refined = policy.refine(obs, &a_init, &ctx)?;
        latency.refine_ms = ms(started);
        refinement_context = Some(text);
    }

    let revised = !actions_equivalent(&a_init, &a_refined);
    Ok(AgentStepRecord {
        t_s: obs.time_s,
        observation: obs.clone(),
        a_init,
        predicted_obs,
        wm_error,
        refinement_context,
        a_refined,
        revised,
        latency,
    })
}
