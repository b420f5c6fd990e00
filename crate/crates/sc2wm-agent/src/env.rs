use std::collections::BTreeSet;

use sc2wm_obs::{
    is_worker_kind, parse_observation, Entity, Observation, TimedAction, TrajectoryRecord,
    SUPPLY_CAP_MAX,
};
use sc2wm_sim::{simulate_logged, SimConfig, SimEvent};

use crate::episode::{IssuedAction, MatchResult, SecondTelemetry};
use crate::AgentError;

/// Per-interval output of an environment step.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// One row per elapsed second, counters cumulative over the episode.
    pub seconds: Vec<SecondTelemetry>,
    pub issued: Vec<IssuedAction>,
}

/// What the decision loop runs against: either the rule simulator acting as
/// a toy closed-loop game, or a recorded trajectory replayed open-loop.
pub trait Environment {
    /// The observation opening the next decision interval, or `None` once
    /// the episode is over.
    fn observe(&mut self) -> Option<Observation>;
    /// Executes the refined actions across one decision interval.
    fn step(&mut self, actions: &[TimedAction]) -> Result<StepReport, AgentError>;
    /// Terminal result; meaningful once `observe` returns `None`.
    fn result(&self) -> MatchResult;
    /// Seconds between decision steps.
    fn cadence_s(&self) -> u32;
}

/// Running cumulative counters shared by both adapters.
#[derive(Debug, Clone, Default)]
struct Tally {
    minerals_collected: u64,
    minerals_spent: u64,
    gas_collected: u64,
    gas_spent: u64,
    killed_army_value: u64,
    lost_army_value: u64,
}

impl Tally {
    fn row(&self, obs: &Observation) -> SecondTelemetry {
        SecondTelemetry {
            t_s: obs.time_s,
            supply_blocked: obs.supply_used == obs.supply_cap && obs.supply_cap < SUPPLY_CAP_MAX,
            minerals_collected: self.minerals_collected,
            minerals_spent: self.minerals_spent,
            gas_collected: self.gas_collected,
            gas_spent: self.gas_spent,
            killed_army_value: self.killed_army_value,
            lost_army_value: self.lost_army_value,
        }
    }
}

/// Income earned between two absolute seconds at a fixed per-minute rate,
/// matching the simulator's accrual exactly.
fn accrued(rate: u32, t0: u32, t1: u32) -> u64 {
    (rate as u64 * t1 as u64) / 60 - (rate as u64 * t0 as u64) / 60
}

fn rebase(actions: &[TimedAction], second: u32) -> Vec<TimedAction> {
    actions
        .iter()
        .filter(|a| a.substep() == second)
        .map(|a| TimedAction { t_offset_ds: a.t_offset_ds - second * 10, ..a.clone() })
        .collect()
}

fn overdue(actions: &[TimedAction], cadence_s: u32, t_s: u32, issued: &mut Vec<IssuedAction>) {
    for a in actions.iter().filter(|a| a.substep() >= cadence_s) {
        issued.push(IssuedAction {
            t_s,
            action: a.clone(),
            valid: false,
            reason: Some("offset beyond decision interval".to_string()),
        });
    }
}

/// The rule simulator as a self-contained environment. Episodes end at
/// `max_time_s`, when the player has no structures left (loss), or when a
/// previously seen enemy has been wiped out (win); anything else is a draw.
pub struct RuleSimEnv {
    obs: Observation,
    cfg: SimConfig,
    cadence_s: u32,
    max_time_s: u32,
    enemy_seen: bool,
    tally: Tally,
}

impl RuleSimEnv {
    pub fn new(
        initial: Observation,
        cfg: SimConfig,
        cadence_s: u32,
        max_time_s: u32,
    ) -> Result<RuleSimEnv, AgentError> {
        initial.validate().map_err(AgentError::Invalid)?;
        if cadence_s == 0 {
            return Err(AgentError::Invalid("cadence_s must be >= 1".to_string()));
        }
        if max_time_s <= initial.time_s {
            return Err(AgentError::Invalid(format!(
                "max_time_s {max_time_s} must exceed the initial time {}",
                initial.time_s
            )));
        }
        let enemy_seen = has_enemies(&initial);
        Ok(RuleSimEnv { obs: initial, cfg, cadence_s, max_time_s, enemy_seen, tally: Tally::default() })
    }

    fn defeated(&self) -> bool {
        self.obs.my_structures.is_empty()
    }

    fn victorious(&self) -> bool {
        self.enemy_seen && !has_enemies(&self.obs)
    }

    fn finished(&self) -> bool {
        self.obs.time_s >= self.max_time_s || self.defeated() || self.victorious()
    }
}

fn has_enemies(obs: &Observation) -> bool {
    !(obs.enemy_units.is_empty()
        && obs.enemy_structures.is_empty()
        && obs.snapshot_enemy_structures.is_empty())
}

impl Environment for RuleSimEnv {
    fn observe(&mut self) -> Option<Observation> {
        if self.finished() {
            None
        } else {
            Some(self.obs.clone())
        }
    }

    fn step(&mut self, actions: &[TimedAction]) -> Result<StepReport, AgentError> {
        if self.finished() {
            return Err(AgentError::Env("step called after the episode ended".to_string()));
        }
        let decision_t = self.obs.time_s;
        let mut seconds = Vec::with_capacity(self.cadence_s as usize);
        let mut issued = Vec::new();
        for k in 0..self.cadence_s {
            let local = rebase(actions, k);
            let prev_minerals = self.obs.minerals as u64;
            let prev_gas = self.obs.gas as u64;
            let acc_m = accrued(self.obs.minerals_rate, self.obs.time_s, self.obs.time_s + 1);
            let acc_g = accrued(self.obs.gas_rate, self.obs.time_s, self.obs.time_s + 1);
            let out = simulate_logged(&self.obs, &local, 1, &self.cfg)
                .map_err(|e| AgentError::Env(e.to_string()))?;

            self.tally.minerals_collected += acc_m;
            self.tally.gas_collected += acc_g;
            self.tally.minerals_spent += (prev_minerals + acc_m).saturating_sub(out.obs.minerals as u64);
            self.tally.gas_spent += (prev_gas + acc_g).saturating_sub(out.obs.gas as u64);
            for event in &out.events {
                if let SimEvent::UnitKilled { mine, value, is_army: true, .. } = event {
                    if *mine {
                        self.tally.lost_army_value += *value as u64;
                    } else {
                        self.tally.killed_army_value += *value as u64;
                    }
                }
            }
            for outcome in out.actions {
                issued.push(IssuedAction {
                    t_s: decision_t + k,
                    action: outcome.action,
                    valid: outcome.accepted,
                    reason: outcome.reason,
                });
            }
            self.obs = out.obs;
            self.enemy_seen = self.enemy_seen || has_enemies(&self.obs);
            seconds.push(self.tally.row(&self.obs));
        }
        overdue(actions, self.cadence_s, decision_t, &mut issued);
        Ok(StepReport { seconds, issued })
    }

    fn result(&self) -> MatchResult {
        if self.victorious() {
            MatchResult::Win
        } else if self.defeated() {
            MatchResult::Loss
        } else {
            MatchResult::Draw
        }
    }

    fn cadence_s(&self) -> u32 {
        self.cadence_s
    }
}

/// Open-loop replay of a recorded 1 Hz trajectory. Agent actions never
/// change the stream; the rule simulator only serves as the validity oracle
/// for issued actions. Kill and loss values are inferred from units
/// disappearing between consecutive records, so units that merely leave
/// vision are overcounted as kills; replay combat telemetry is an
/// approximation.
pub struct ReplayEnv {
    observations: Vec<Observation>,
    cursor: usize,
    cadence_s: u32,
    cfg: SimConfig,
    result: MatchResult,
    tally: Tally,
}

impl ReplayEnv {
    pub fn new(
        records: &[TrajectoryRecord],
        cadence_s: u32,
        cfg: SimConfig,
    ) -> Result<ReplayEnv, AgentError> {
        if cadence_s == 0 {
            return Err(AgentError::Invalid("cadence_s must be >= 1".to_string()));
        }
        if records.is_empty() {
            return Err(AgentError::Invalid("replay requires at least one record".to_string()));
        }
        let mut observations = Vec::with_capacity(records.len());
        for (i, record) in records.iter().enumerate() {
            if i > 0 && record.t_s != records[i - 1].t_s + 1 {
                return Err(AgentError::Invalid(format!(
                    "trajectory {} is not 1 Hz between t={} and t={}",
                    record.meta.trajectory_id,
                    records[i - 1].t_s,
                    record.t_s
                )));
            }
            let obs = parse_observation(&record.obs_text).map_err(|e| {
                AgentError::Invalid(format!(
                    "trajectory {} t={}: {e}",
                    record.meta.trajectory_id, record.t_s
                ))
            })?;
            if obs.time_s != record.t_s {
                return Err(AgentError::Invalid(format!(
                    "trajectory {} t={}: observation clock reads {}",
                    record.meta.trajectory_id, record.t_s, obs.time_s
                )));
            }
            observations.push(obs);
        }
        let result = match records[0].meta.result.as_str() {
            "win" => MatchResult::Win,
            "loss" => MatchResult::Loss,
            _ => MatchResult::Draw,
        };
        Ok(ReplayEnv { observations, cursor: 0, cadence_s, cfg, result, tally: Tally::default() })
    }
}

/// Total table value of army entities present in `before` but gone from
/// `after`; kinds missing from the table count zero.
fn missing_army_value(before: &[Entity], after: &[Entity], cfg: &SimConfig) -> u64 {
    let alive: BTreeSet<u32> = after.iter().map(|e| e.id).collect();
    before
        .iter()
        .filter(|e| !alive.contains(&e.id) && !is_worker_kind(&e.kind))
        .filter_map(|e| cfg.units.get(&e.kind))
        .map(|spec| (spec.mineral_cost + spec.gas_cost) as u64)
        .sum()
}

impl Environment for ReplayEnv {
    fn observe(&mut self) -> Option<Observation> {
        if self.cursor + self.cadence_s as usize >= self.observations.len() {
            None
        } else {
            Some(self.observations[self.cursor].clone())
        }
    }

    fn step(&mut self, actions: &[TimedAction]) -> Result<StepReport, AgentError> {
        if self.cursor + self.cadence_s as usize >= self.observations.len() {
            return Err(AgentError::Env("step called after the replay ended".to_string()));
        }
        let decision_t = self.observations[self.cursor].time_s;
        let mut seconds = Vec::with_capacity(self.cadence_s as usize);
        let mut issued = Vec::new();
        for k in 0..self.cadence_s {
            let idx = self.cursor + k as usize;
            let prev = &self.observations[idx];
            let next = &self.observations[idx + 1];
            let local = rebase(actions, k);
            let out = simulate_logged(prev, &local, 1, &self.cfg)
                .map_err(|e| AgentError::Env(e.to_string()))?;
            for outcome in out.actions {
                issued.push(IssuedAction {
                    t_s: decision_t + k,
                    action: outcome.action,
                    valid: outcome.accepted,
                    reason: outcome.reason,
                });
            }
            let acc_m = accrued(prev.minerals_rate, prev.time_s, next.time_s);
            let acc_g = accrued(prev.gas_rate, prev.time_s, next.time_s);
            self.tally.minerals_collected += acc_m;
            self.tally.gas_collected += acc_g;
            self.tally.minerals_spent += (prev.minerals as u64 + acc_m).saturating_sub(next.minerals as u64);
            self.tally.gas_spent += (prev.gas as u64 + acc_g).saturating_sub(next.gas as u64);
            self.tally.lost_army_value += missing_army_value(&prev.my_units, &next.my_units, &self.cfg);
            self.tally.killed_army_value +=
                missing_army_value(&prev.enemy_units, &next.enemy_units, &self.cfg);
            seconds.push(self.tally.row(next));
        }
        overdue(actions, self.cadence_s, decision_t, &mut issued);
        self.cursor += self.cadence_s as usize;
        Ok(StepReport { seconds, issued })
    }

    fn result(&self) -> MatchResult {
        self.result
    }

    fn cadence_s(&self) -> u32 {
        self.cadence_s
    }
}
