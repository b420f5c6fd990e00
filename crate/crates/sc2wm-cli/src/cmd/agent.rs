use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use sc2wm_agent::{
    run_episode, write_match_logs, AgentConfig, Environment, MatchLog, ReplayEnv, RuleSimEnv,
    ScriptedPolicy,
};
use sc2wm_obs::jsonl::read_jsonl;
use sc2wm_obs::TrajectoryRecord;
use sc2wm_predict::{Predictor, RemotePredictor, RuleSimPredictor, StaticBias};
use sc2wm_sim::{ScriptedScenario, UnitTable};

use crate::config::{read_config_file, RunConfig};
use crate::error::{data, usage, CliError};

#[derive(Subcommand)]
pub enum AgentCommand {
    /// Run Generate-Simulate-Refine episodes and write match logs.
    Run(AgentRunArgs),
}

/// World-model backend configuration for episodes, loaded from `--wm`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WmConfig {
    /// `static`, `rulesim`, or `remote`.
    pub backend: String,
    /// Keep the static backend's clock frozen too.
    pub strict_copy: bool,
    /// Unit table for the rulesim backend.
    pub unit_table: Option<PathBuf>,
    pub remote: sc2wm_predict::RemoteConfig,
}

impl Default for WmConfig {
    fn default() -> Self {
        WmConfig {
            backend: "rulesim".to_string(),
            strict_copy: false,
            unit_table: None,
            remote: sc2wm_predict::RemoteConfig::default(),
        }
    }
}

#[derive(Args)]
pub struct AgentRunArgs {
    /// Environment: rulesim (closed loop) or replay (open loop).
    #[arg(long)]
    env: Option<String>,
    /// Scenario file for the rulesim environment.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Recorded trajectory corpus for the replay environment; one episode
    /// runs per trajectory.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Scripted policy configuration (TOML or JSON).
    #[arg(long)]
    policy: Option<PathBuf>,
    /// World-model backend configuration (TOML or JSON).
    #[arg(long)]
    wm: Option<PathBuf>,
    /// Ablation mode: full, refine-only, zeroshot-wm, or generate.
    #[arg(long)]
    ablation: Option<String>,
    /// Output directory for per-episode match logs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Episode length cap in game seconds (rulesim only).
    #[arg(long)]
    length: Option<u32>,
    /// Decision interval in game seconds.
    #[arg(long)]
    cadence: Option<u32>,
    /// Simulation horizon in game seconds.
    #[arg(long)]
    horizon: Option<u32>,
    /// Player id override; defaults to the scenario or recording.
    #[arg(long)]
    player_id: Option<u32>,
    /// Match id override (single-episode runs only).
    #[arg(long)]
    match_id: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_wm(wm: &WmConfig) -> Result<Box<dyn Predictor>, CliError> {
    match wm.backend.as_str() {
        "static" => Ok(Box::new(StaticBias { strict_copy: wm.strict_copy })),
        "rulesim" => {
            let mut cfg = sc2wm_sim::SimConfig::default();
            if let Some(path) = &wm.unit_table {
                let file =
                    File::open(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
                cfg.units = UnitTable::from_json(file)
                    .map_err(|e| data(format!("{}: {e}", path.display())))?;
            }
            Ok(Box::new(RuleSimPredictor { cfg }))
        }
        "remote" => Ok(Box::new(
            RemotePredictor::new(wm.remote.clone()).map_err(|e| usage(e.to_string()))?,
        )),
        other => Err(usage(format!(
            "unknown world-model backend {other:?}; expected static, rulesim, or remote"
        ))),
    }
}

fn file_name(match_id: &str) -> String {
    let safe: String = match_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '-' })
        .collect();
    format!("{safe}.jsonl")
}

pub fn run(args: AgentRunArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    if let Some(v) = args.ablation.clone() {
        cfg.ablation = v;
    }
    if let Some(v) = args.out.clone() {
        cfg.output = Some(v);
    }
    if let Some(v) = args.length {
        cfg.length_s = v;
    }
    if let Some(v) = args.cadence {
        cfg.cadence_s = v;
    }
    if let Some(v) = args.horizon {
        cfg.horizon_s = v;
    }
    if let Some(v) = args.player_id {
        cfg.player_id = v;
    }
    let env_kind = args.env.as_deref().ok_or_else(|| usage("--env is required"))?;
    let out = cfg.output.clone().ok_or_else(|| usage("--out is required"))?;
    let mode = cfg.ablation_mode()?;

    let policy: ScriptedPolicy = match &args.policy {
        Some(path) => read_config_file(path)?,
        None => ScriptedPolicy::default(),
    };
    let wm_cfg: WmConfig = match &args.wm {
        Some(path) => read_config_file(path)?,
        None => WmConfig::default(),
    };
    let world_model: Box<dyn Predictor> = if mode.simulates() {
        build_wm(&wm_cfg)?
    } else {
        Box::new(StaticBias::default())
    };
    let sim_cfg = cfg.sim_config()?;

    struct Episode {
        match_id: String,
        player_id: u32,
        env: Box<dyn Environment>,
    }
    let mut episodes: Vec<Episode> = Vec::new();
    match env_kind {
        "rulesim" => {
            let path = args
                .scenario
                .as_ref()
                .ok_or_else(|| usage("--scenario is required with --env rulesim"))?;
            let file = File::open(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
            let scenario = ScriptedScenario::from_json(file)
                .map_err(|e| data(format!("{}: {e}", path.display())))?;
            let max_time_s = scenario.initial.time_s + cfg.length_s;
            let env =
                RuleSimEnv::new(scenario.initial.clone(), sim_cfg.clone(), cfg.cadence_s, max_time_s)
                    .map_err(|e| data(format!("{}: {e}", path.display())))?;
            episodes.push(Episode {
                match_id: args.match_id.clone().unwrap_or_else(|| scenario.name.clone()),
                player_id: args.player_id.unwrap_or(scenario.player_id),
                env: Box::new(env),
            });
        }
        "replay" => {
            let path = args
                .replay
                .as_ref()
                .ok_or_else(|| usage("--replay is required with --env replay"))?;
            let file = File::open(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
            let records: Vec<TrajectoryRecord> = read_jsonl(BufReader::new(file))
                .map_err(|e| data(format!("{}: {e}", path.display())))?;
            if records.is_empty() {
                return Err(data(format!("{}: no trajectory records", path.display())));
            }
            let mut groups: Vec<Vec<TrajectoryRecord>> = Vec::new();
            for record in records {
                match groups.last_mut() {
                    Some(group)
                        if group[0].meta.trajectory_id == record.meta.trajectory_id =>
                    {
                        group.push(record)
                    }
                    _ => groups.push(vec![record]),
                }
            }
            if groups.len() > 1 && args.match_id.is_some() {
                return Err(usage("--match-id requires a single-trajectory replay"));
            }
            for group in groups {
                let env = ReplayEnv::new(&group, cfg.cadence_s, sim_cfg.clone())
                    .map_err(|e| data(format!("{}: {e}", path.display())))?;
                episodes.push(Episode {
                    match_id: args
                        .match_id
                        .clone()
                        .unwrap_or_else(|| group[0].meta.trajectory_id.clone()),
                    player_id: args.player_id.unwrap_or(group[0].meta.player_id),
                    env: Box::new(env),
                });
            }
        }
        other => {
            return Err(usage(format!(
                "unknown environment {other:?}; expected rulesim or replay"
            )));
        }
    }

    fs::create_dir_all(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
    for episode in &mut episodes {
        let agent_cfg = AgentConfig {
            horizon_s: cfg.horizon_s,
            player_id: episode.player_id,
            mode,
        };
        agent_cfg.validate().map_err(|e| usage(e.to_string()))?;
        let mut policy = policy.clone();
        let log: MatchLog = run_episode(
            &episode.match_id,
            episode.env.as_mut(),
            &mut policy,
            world_model.as_ref(),
            &agent_cfg,
        );
        let path = out.join(file_name(&episode.match_id));
        write_match_logs(&path, std::slice::from_ref(&log)).map_err(|e| data(e.to_string()))?;
        let revised = log.steps.iter().filter(|s| s.revised).count();
        match &log.aborted {
            Some(reason) => println!(
                "{}: {} after {} steps ({} revised), aborted: {reason}",
                episode.match_id,
                log.result,
                log.steps.len(),
                revised
            ),
            None => println!(
                "{}: {} in {} s, {} steps ({} revised)",
                episode.match_id,
                log.result,
                log.total_time_s,
                log.steps.len(),
                revised
            ),
        }
    }
    cfg.persist("agent-run", &out, true)?;
    println!("{} match logs -> {}", episodes.len(), out.display());
    Ok(())
}
