use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use sc2wm_obs::{parse_action_line, parse_observation, serialize_observation, TimedAction};
use sc2wm_predict::Predictor;

use crate::env::Environment;
use crate::policy::Policy;
use crate::step::{gsr_step, AgentConfig, AgentStepRecord, PhaseLatency};
use crate::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchResult {
    Win,
    Loss,
    Draw,
}

impl fmt::Display for MatchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchResult::Win => "win",
            MatchResult::Loss => "loss",
            MatchResult::Draw => "draw",
        })
    }
}

/// Telemetry for one elapsed game second. All counters are cumulative over
/// the episode, so any row is also the episode total up to its time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondTelemetry {
    /// Absolute game time after this second elapsed.
    pub t_s: u32,
    pub supply_blocked: bool,
    pub minerals_collected: u64,
    pub minerals_spent: u64,
    pub gas_collected: u64,
    pub gas_spent: u64,
    pub killed_army_value: u64,
    pub lost_army_value: u64,
}

/// One action handed to the environment, with the engine's verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct IssuedAction {
    pub t_s: u32,
    pub action: TimedAction,
    pub valid: bool,
    pub reason: Option<String>,
}

/// Everything recorded about one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchLog {
    pub match_id: String,
    pub steps: Vec<AgentStepRecord>,
    pub telemetry: Vec<SecondTelemetry>,
    pub issued: Vec<IssuedAction>,
    pub result: MatchResult,
    /// Absolute game time when the episode ended.
    pub total_time_s: u32,
    /// Failure that stopped the episode early, if any; everything recorded
    /// before the failure is retained.
    pub aborted: Option<String>,
}

impl MatchLog {
    pub fn validate(&self) -> Result<(), AgentError> {
        let mut prev: Option<&SecondTelemetry> = None;
        for row in &self.telemetry {
            if let Some(p) = prev {
                let ordered = row.t_s == p.t_s + 1
                    && row.minerals_collected >= p.minerals_collected
                    && row.minerals_spent >= p.minerals_spent
                    && row.gas_collected >= p.gas_collected
                    && row.gas_spent >= p.gas_spent
                    && row.killed_army_value >= p.killed_army_value
                    && row.lost_army_value >= p.lost_army_value;
                if !ordered {
                    return Err(AgentError::Invalid(format!(
                        "match {}: telemetry regresses at t={}",
                        self.match_id, row.t_s
                    )));
                }
            }
            prev = Some(row);
        }
        if let Some(step) = self.steps.last() {
            if self.total_time_s < step.t_s {
                return Err(AgentError::Invalid(format!(
                    "match {}: total_time_s {} precedes the last step at t={}",
                    self.match_id, self.total_time_s, step.t_s
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = MatchLogFile {
            match_id: self.match_id.clone(),
            steps: self.steps.iter().map(StepFile::from_record).collect(),
            telemetry: self.telemetry.clone(),
            issued: self
                .issued
                .iter()
                .map(|i| IssuedFile {
                    t_s: i.t_s,
                    action: i.action.to_string(),
                    valid: i.valid,
                    reason: i.reason.clone(),
                })
                .collect(),
            result: self.result,
            total_time_s: self.total_time_s,
            aborted: self.aborted.clone(),
        };
        serde_json::to_string(&file).expect("match log serializes")
    }

    pub fn from_json(text: &str) -> Result<MatchLog, AgentError> {
        let file: MatchLogFile =
            serde_json::from_str(text).map_err(|e| AgentError::Invalid(e.to_string()))?;
        let locate = |detail: String| AgentError::Invalid(format!("match {}: {detail}", file.match_id));
        let mut steps = Vec::with_capacity(file.steps.len());
        for step in &file.steps {
            steps.push(step.to_record().map_err(&locate)?);
        }
        let mut issued = Vec::with_capacity(file.issued.len());
        for entry in &file.issued {
            issued.push(IssuedAction {
                t_s: entry.t_s,
                action: parse_action_line(&entry.action, 1).map_err(|e| locate(e.to_string()))?,
                valid: entry.valid,
                reason: entry.reason.clone(),
            });
        }
        let log = MatchLog {
            match_id: file.match_id,
            steps,
            telemetry: file.telemetry,
            issued,
            result: file.result,
            total_time_s: file.total_time_s,
            aborted: file.aborted,
        };
        log.validate()?;
        Ok(log)
    }
}

#[derive(Serialize, Deserialize)]
struct MatchLogFile {
    match_id: String,
    steps: Vec<StepFile>,
    telemetry: Vec<SecondTelemetry>,
    issued: Vec<IssuedFile>,
    result: MatchResult,
    total_time_s: u32,
    aborted: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct StepFile {
    t_s: u32,
    obs_text: String,
    a_init: Vec<String>,
    predicted_obs_text: Option<String>,
    wm_error: Option<String>,
    refinement_context: Option<String>,
    a_refined: Vec<String>,
    revised: bool,
    latency: PhaseLatency,
}

impl StepFile {
    fn from_record(record: &AgentStepRecord) -> StepFile {
        StepFile {
            t_s: record.t_s,
            obs_text: serialize_observation(&record.observation),
            a_init: record.a_init.iter().map(|a| a.to_string()).collect(),
            predicted_obs_text: record.predicted_obs.as_ref().map(serialize_observation),
            wm_error: record.wm_error.clone(),
            refinement_context: record.refinement_context.clone(),
            a_refined: record.a_refined.iter().map(|a| a.to_string()).collect(),
            revised: record.revised,
            latency: record.latency.clone(),
        }
    }

    fn to_record(&self) -> Result<AgentStepRecord, String> {
        let actions = |lines: &[String]| -> Result<Vec<TimedAction>, String> {
            lines
                .iter()
                .enumerate()
                .map(|(i, line)| parse_action_line(line, i + 1).map_err(|e| e.to_string()))
                .collect()
        };
        Ok(AgentStepRecord {
            t_s: self.t_s,
            observation: parse_observation(&self.obs_text).map_err(|e| e.to_string())?,
            a_init: actions(&self.a_init)?,
            predicted_obs: self
                .predicted_obs_text
                .as_deref()
                .map(parse_observation)
                .transpose()
                .map_err(|e| e.to_string())?,
            wm_error: self.wm_error.clone(),
            refinement_context: self.refinement_context.clone(),
            a_refined: actions(&self.a_refined)?,
            revised: self.revised,
            latency: self.latency.clone(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct IssuedFile {
    t_s: u32,
    action: String,
    valid: bool,
    reason: Option<String>,
}

/// One match log per line.
pub fn write_match_logs(path: &Path, logs: &[MatchLog]) -> Result<(), AgentError> {
    let file = File::create(path).map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    for log in logs {
        writeln!(out, "{}", log.to_json())
            .map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))?;
    }
    out.flush().map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))
}

pub fn read_match_logs(path: &Path) -> Result<Vec<MatchLog>, AgentError> {
    let file = File::open(path).map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))?;
    let mut logs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let log = MatchLog::from_json(&line).map_err(|e| {
            AgentError::Invalid(format!("{} line {}: {e}", path.display(), i + 1))
        })?;
        logs.push(log);
    }
    Ok(logs)
}

/// Runs the decision loop until the environment ends the episode.
///
/// Policy and environment failures stop the loop but never discard it: the
/// log is returned with everything recorded up to the failure and the
/// failure noted in `aborted`. World-model failures are handled inside
/// [`gsr_step`] and do not stop the loop.
pub fn run_episode(
    match_id: &str,
    env: &mut dyn Environment,
    policy: &mut dyn Policy,
    world_model: &dyn Predictor,
    cfg: &AgentConfig,
) -> MatchLog {
    let mut log = MatchLog {
        match_id: match_id.to_string(),
        steps: Vec::new(),
        telemetry: Vec::new(),
        issued: Vec::new(),
        result: MatchResult::Draw,
        total_time_s: 0,
        aborted: None,
    };
    loop {
        let Some(obs) = env.observe() else { break };
        log.total_time_s = obs.time_s;
        let record = match gsr_step(&obs, policy, world_model, cfg) {
            Ok(record) => record,
            Err(e) => {
                log.aborted = Some(e.to_string());
                break;
            }
        };
        let a_refined = record.a_refined.clone();
        log.steps.push(record);
        match env.step(&a_refined) {
            Ok(report) => {
                if let Some(last) = report.seconds.last() {
                    log.total_time_s = last.t_s;
                }
                log.telemetry.extend(report.seconds);
                log.issued.extend(report.issued);
            }
            Err(e) => {
                log.aborted = Some(e.to_string());
                break;
            }
        }
    }
    log.result = env.result();
    debug_assert!(log.validate().is_ok());
    log
}
