use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use sc2wm_obs::{is_worker_kind, Observation, Target, TimedAction, SUPPLY_CAP_MAX};

/// Failure inside a policy backend.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct PolicyError(pub String);

/// What a policy sees when asked to reconsider its proposal.
pub struct RefineContext<'a> {
    /// Rendered refinement text: a simulation report around the predicted
    /// observation, or reflection guidance when simulation was skipped.
    pub text: &'a str,
    /// The predicted observation behind a simulation report; `None` under
    /// reflection-only refinement.
    pub predicted: Option<&'a Observation>,
}

/// An action source for the decision loop. Proposal and refinement are
/// separate calls because the loop runs them as distinct phases with the
/// refinement context constructed in between.
pub trait Policy {
    fn propose(&mut self, obs: &Observation) -> Result<Vec<TimedAction>, PolicyError>;

    /// Second pass conditioned on the refinement context. The default
    /// keeps the proposal unchanged.
    fn refine(
        &mut self,
        obs: &Observation,
        a_init: &[TimedAction],
        ctx: &RefineContext,
    ) -> Result<Vec<TimedAction>, PolicyError> {
        let _ = (obs, ctx);
        Ok(a_init.to_vec())
    }

    fn name(&self) -> &str;
}

/// Deterministic policy for tests and closed-loop runs: proposes scripted
/// actions keyed by decision time and refines with a fixed rule.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScriptedPolicy {
    /// Actions proposed when a decision step starts at exactly this second.
    /// Offsets are relative to that step.
    pub script: BTreeMap<u32, Vec<TimedAction>>,
    pub refiner: Refiner,
}

/// Refinement rule of a [`ScriptedPolicy`]. The guards only act on a
/// predicted observation; without one they keep the proposal.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refiner {
    /// Keep the proposal.
    #[default]
    Identity,
    /// Queue a supply depot when the predicted future has less than
    /// `min_unused` free supply and none is already on the way.
    SupplyGuard { min_unused: u32 },
    /// Swap infrastructure spending for worker production when the
    /// predicted future is mineral-starved while supply headroom is ample.
    EconomyGuard { low_minerals: u32, min_unused: u32 },
}

const DEPOT_MINERAL_COST: u32 = 100;

impl ScriptedPolicy {
    pub fn new(script: BTreeMap<u32, Vec<TimedAction>>, refiner: Refiner) -> ScriptedPolicy {
        ScriptedPolicy { script, refiner }
    }
}

impl Policy for ScriptedPolicy {
    fn propose(&mut self, obs: &Observation) -> Result<Vec<TimedAction>, PolicyError> {
        Ok(self.script.get(&obs.time_s).cloned().unwrap_or_default())
    }

    fn refine(
        &mut self,
        obs: &Observation,
        a_init: &[TimedAction],
        ctx: &RefineContext,
    ) -> Result<Vec<TimedAction>, PolicyError> {
        let Some(pred) = ctx.predicted else {
            return Ok(a_init.to_vec());
        };
        let unused = pred.supply_cap.saturating_sub(pred.supply_used);
        match self.refiner {
            Refiner::Identity => Ok(a_init.to_vec()),
            Refiner::SupplyGuard { min_unused } => {
                let depot_on_the_way = pred
                    .queue
                    .iter()
                    .any(|q| q.is_construction && q.task == "Supplydepot")
                    || a_init.iter().any(|a| a.command == "Build_supplydepot");
                if unused >= min_unused
                    || pred.supply_cap >= SUPPLY_CAP_MAX
                    || depot_on_the_way
                    || obs.minerals < DEPOT_MINERAL_COST
                {
                    return Ok(a_init.to_vec());
                }
                let Some(worker) = obs.my_units.iter().find(|u| is_worker_kind(&u.kind)) else {
                    return Ok(a_init.to_vec());
                };
                let mut out = a_init.to_vec();
                out.push(TimedAction {
                    t_offset_ds: 1,
                    subject_kind: worker.kind.clone(),
                    subject_id: worker.id,
                    command: "Build_supplydepot".to_string(),
                    target: Target::Point(worker.pos.0 + 3, worker.pos.1),
                });
                Ok(out)
            }
            Refiner::EconomyGuard { low_minerals, min_unused } => {
                if pred.minerals >= low_minerals || unused < min_unused {
                    return Ok(a_init.to_vec());
                }
                let mut out: Vec<TimedAction> = a_init
                    .iter()
                    .filter(|a| a.command != "Build_supplydepot")
                    .cloned()
                    .collect();
                if out.len() < a_init.len() {
                    if let Some(base) = obs
                        .my_structures
                        .iter()
                        .find(|s| matches!(s.kind.as_str(), "Commandcenter" | "Orbitalcommand"))
                    {
                        out.push(TimedAction {
                            t_offset_ds: 1,
                            subject_kind: base.kind.clone(),
                            subject_id: base.id,
                            command: "Commandcentertrain_scv".to_string(),
                            target: Target::None,
                        });
                    }
                }
                Ok(out)
            }
        }
    }

    fn name(&self) -> &str {
        "scripted"
    }
}
