use std::collections::BTreeMap;
use std::fs;

use sc2wm_agent::{
    actions_equivalent, gsr_step, read_match_logs, render_refine_context, run_episode,
    write_match_logs, AblationMode, AgentConfig, MatchLog, MatchResult, Policy, PolicyError,
    Refiner, ReplayEnv, RuleSimEnv, ScriptedPolicy,
    SELF_REFLECTION_TEMPLATE,
};
use sc2wm_obs::{
    parse_observation, Entity, Observation, Race, Target, TimedAction, WorkerSummary,
};
use sc2wm_predict::{PredictError, PredictionRequest, Predictor, RuleSimPredictor};
use sc2wm_sim::{generate_trajectory, scenarios, SimConfig};

fn fixture(name: &str) -> String {
    let path = format!(
        "{}/../sc2wm-obs/tests/fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    );
    fs::read_to_string(path).unwrap()
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    fs::read_to_string(path).unwrap()
}

fn act(t_offset_ds: u32, kind: &str, id: u32, command: &str, target: Target) -> TimedAction {
    TimedAction {
        t_offset_ds,
        subject_kind: kind.to_string(),
        subject_id: id,
        command: command.to_string(),
        target,
    }
}

/// World model stub that always returns the same observation.
struct FixedWm(Observation);

impl Predictor for FixedWm {
    fn predict(&self, _req: &PredictionRequest) -> Result<Observation, PredictError> {
        Ok(self.0.clone())
    }

    fn name(&self) -> &'static str {
        "fixed"
    }
}

/// World model stub that always fails.
struct FailingWm;

impl Predictor for FailingWm {
    fn predict(&self, _req: &PredictionRequest) -> Result<Observation, PredictError> {
        Err(PredictError::Timeout { attempts: 3 })
    }

    fn name(&self) -> &'static str {
        "failing"
    }
}

// ---------------------------------------------------------------------------
// Context rendering and revision detection

#[test]
fn refine_context_matches_the_golden_file() {
    let predicted = parse_observation(&fixture("terran_midgame_target.txt")).unwrap();
    assert_eq!(render_refine_context(&predicted, 5), golden("refine_context.txt"));
}

#[test]
fn action_set_equality_ignores_order_and_offsets() {
    let train = act(1, "Barracks", 2, "Barrackstrain_marine", Target::None);
    let vmove = act(23, "Marine", 30, "Move", Target::Point(10, 12));
    let retimed_train = act(48, "Barracks", 2, "Barrackstrain_marine", Target::None);

    assert!(actions_equivalent(
        &[train.clone(), vmove.clone()],
        &[vmove.clone(), retimed_train.clone()]
    ));
    assert!(!actions_equivalent(
        &[vmove.clone()],
        &[act(23, "Marine", 30, "Move", Target::Point(10, 13))]
    ));
    assert!(!actions_equivalent(&[train.clone(), train.clone()], &[train.clone()]));
    assert!(!actions_equivalent(&[train], &[]));
}

// ---------------------------------------------------------------------------
// Single decision steps

#[test]
fn identity_refinement_is_not_a_revision() {
    let scenario = &scenarios::standard_batch(3)[1];
    let t = scenario.initial.time_s;
    let mut script = BTreeMap::new();
    script.insert(t, vec![act(1, "Commandcenter", 1, "Commandcentertrain_scv", Target::None)]);
    let mut policy = ScriptedPolicy::new(script, Refiner::Identity);
    let wm = RuleSimPredictor::default();

    let record = gsr_step(&scenario.initial, &mut policy, &wm, &AgentConfig::default()).unwrap();
    assert_eq!(record.t_s, t);
    assert_eq!(record.a_refined, record.a_init);
    assert!(!record.revised);
    assert!(record.predicted_obs.is_some());
    assert!(record.wm_error.is_none());
    let context = record.refinement_context.unwrap();
    assert!(context.contains("<simulation_report>"));
    assert!(context.contains("PREDICTED GAME STATE** 5 seconds"));
}

/// A mineral-starved prediction with ample supply headroom makes the
/// economy guard swap infrastructure spending for worker production.
#[test]
fn economy_guard_revises_depot_into_worker_training() {
    let mut obs = Observation::empty(120);
    obs.race = Race::Terran;
    obs.minerals = 150;
    obs.minerals_rate = 500;
    obs.supply_used = 12;
    obs.supply_cap = 30;
    obs.supply_workers = 12;
    obs.workers = WorkerSummary::default();
    let mut scv = Entity::new(7, "Scv", (20, 20), 100);
    obs.my_units.push(scv.clone());
    for id in 8..19 {
        scv.id = id;
        obs.my_units.push(scv.clone());
        obs.workers.mining.insert(id);
    }
    obs.my_structures.push(Entity::new(1, "Commandcenter", (22, 22), 100));
    obs.validate().unwrap();

    let mut predicted = obs.clone();
    predicted.time_s += 5;
    predicted.minerals = 50;
    assert_eq!(predicted.supply_cap - predicted.supply_used, 18);

    let mut script = BTreeMap::new();
    script.insert(
        120,
        vec![act(1, "Scv", 7, "Build_supplydepot", Target::Point(24, 20))],
    );
    let mut policy =
        ScriptedPolicy::new(script, Refiner::EconomyGuard { low_minerals: 100, min_unused: 10 });
    let wm = FixedWm(predicted);

    let record = gsr_step(&obs, &mut policy, &wm, &AgentConfig::default()).unwrap();
    assert!(record.revised);
    assert_eq!(record.a_init[0].command, "Build_supplydepot");
    assert_eq!(record.a_refined.len(), 1);
    assert_eq!(record.a_refined[0].command, "Commandcentertrain_scv");
    assert_eq!(record.a_refined[0].subject_id, 1);
}

#[test]
fn world_model_failure_degrades_to_the_unrefined_action() {
    let scenario = &scenarios::standard_batch(3)[1];
    let t = scenario.initial.time_s;
    let proposal = vec![act(1, "Commandcenter", 1, "Commandcentertrain_scv", Target::None)];
    let mut script = BTreeMap::new();
    script.insert(t, proposal.clone());
    let mut policy = ScriptedPolicy::new(script, Refiner::SupplyGuard { min_unused: 3 });

    let record = gsr_step(&scenario.initial, &mut policy, &FailingWm, &AgentConfig::default()).unwrap();
    assert_eq!(record.a_refined, proposal);
    assert!(!record.revised);
    assert!(record.predicted_obs.is_none());
    assert!(record.refinement_context.is_none());
    assert!(record.wm_error.unwrap().contains("timed out"));
}

#[test]
fn ablation_modes_gate_the_phases() {
    let scenario = &scenarios::standard_batch(3)[0];
    let mut policy = ScriptedPolicy::default();

    let generate = AgentConfig { mode: AblationMode::Generate, ..AgentConfig::default() };
    let record = gsr_step(&scenario.initial, &mut policy, &FailingWm, &generate).unwrap();
    assert!(record.predicted_obs.is_none());
    assert!(record.wm_error.is_none());
    assert!(record.refinement_context.is_none());
    assert!(!record.revised);

    let reflect = AgentConfig { mode: AblationMode::RefineOnly, ..AgentConfig::default() };
    let record = gsr_step(&scenario.initial, &mut policy, &FailingWm, &reflect).unwrap();
    assert!(record.predicted_obs.is_none());
    assert!(record.wm_error.is_none());
    assert_eq!(record.refinement_context.unwrap(), SELF_REFLECTION_TEMPLATE);

    let zeroshot = AgentConfig { mode: AblationMode::ZeroshotWm, ..AgentConfig::default() };
    let record =
        gsr_step(&scenario.initial, &mut policy, &RuleSimPredictor::default(), &zeroshot).unwrap();
    assert!(record.predicted_obs.is_some());
    assert!(record.refinement_context.unwrap().contains("<simulation_report>"));

    assert_eq!("refine-only".parse::<AblationMode>().unwrap(), AblationMode::RefineOnly);
    assert!("reflect".parse::<AblationMode>().is_err());
}

// ---------------------------------------------------------------------------
// Closed-loop episodes against the rule simulator

/// Near-capped Terran base: one more marine pins supply to the cap.
fn cramped_base() -> Observation {
    let mut obs = Observation::empty(0);
    obs.race = Race::Terran;
    obs.enemy_race = Race::Terran;
    obs.minerals = 600;
    obs.minerals_rate = 120;
    obs.supply_cap = 23;
    obs.supply_workers = 2;
    obs.my_structures.push(Entity::new(1, "Commandcenter", (30, 30), 100));
    obs.my_structures.push(Entity::new(2, "Supplydepot", (26, 28), 100));
    obs.my_structures.push(Entity::new(3, "Barracks", (34, 28), 100));
    for id in [10, 11] {
        obs.my_units.push(Entity::new(id, "Scv", (28, 31), 100));
        obs.workers.mining.insert(id);
    }
    for i in 0..20 {
        obs.my_units.push(Entity::new(30 + i, "Marine", (38 + (i as i32 % 3), 29), 100));
    }
    obs.supply_army = 20;
    obs.supply_used = 22;
    obs.validate().unwrap();
    obs
}

fn marine_spam_script(until_s: u32, cadence_s: u32) -> BTreeMap<u32, Vec<TimedAction>> {
    (0..until_s)
        .step_by(cadence_s as usize)
        .map(|t| (t, vec![act(1, "Barracks", 3, "Barrackstrain_marine", Target::None)]))
        .collect()
}

fn blocked_seconds(log: &MatchLog) -> usize {
    log.telemetry.iter().filter(|row| row.supply_blocked).count()
}

#[test]
fn supply_guard_refinement_strictly_reduces_supply_block_time() {
    let cfg = SimConfig::default();
    let wm = RuleSimPredictor { cfg: cfg.clone() };
    let agent_cfg = AgentConfig::default();
    let mut logs = Vec::new();
    for refiner in [Refiner::Identity, Refiner::SupplyGuard { min_unused: 3 }] {
        let mut env = RuleSimEnv::new(cramped_base(), cfg.clone(), 5, 60).unwrap();
        let mut policy = ScriptedPolicy::new(marine_spam_script(60, 5), refiner);
        let log = run_episode("supply-drill", &mut env, &mut policy, &wm, &agent_cfg);
        assert!(log.aborted.is_none());
        log.validate().unwrap();
        logs.push(log);
    }
    let baseline = &logs[0];
    let guarded = &logs[1];

    assert!(blocked_seconds(baseline) > 30);
    assert!(
        blocked_seconds(guarded) < blocked_seconds(baseline),
        "guard blocked {} vs baseline {}",
        blocked_seconds(guarded),
        blocked_seconds(baseline)
    );
    assert!(baseline.steps.iter().all(|s| !s.revised));
    assert!(guarded.steps.iter().any(|s| s.revised));
    assert!(guarded
        .issued
        .iter()
        .any(|i| i.action.command == "Build_supplydepot" && i.valid));
    assert!(baseline.issued.iter().any(|i| !i.valid));
}

#[test]
fn quiescent_episode_runs_to_the_time_limit() {
    let scenario = &scenarios::standard_batch(9)[0];
    let cfg = SimConfig::default();
    let t0 = scenario.initial.time_s;
    let mut env = RuleSimEnv::new(scenario.initial.clone(), cfg.clone(), 5, t0 + 30).unwrap();
    let mut policy = ScriptedPolicy::default();
    let wm = RuleSimPredictor { cfg };

    let log = run_episode(&scenario.name, &mut env, &mut policy, &wm, &AgentConfig::default());
    assert!(log.aborted.is_none());
    assert_eq!(log.steps.len(), 6);
    assert_eq!(log.telemetry.len(), 30);
    assert_eq!(log.total_time_s, t0 + 30);
    assert_eq!(log.result, MatchResult::Draw);
    assert!(log.issued.is_empty());
    assert!(log.steps.iter().all(|s| !s.revised));
    log.validate().unwrap();
}

#[test]
fn environment_failure_flushes_the_partial_log() {
    let mut obs = cramped_base();
    obs.my_units.push(Entity::new(90, "Wraith", (40, 40), 100));
    obs.supply_used += 2;
    obs.supply_army += 2;
    obs.validate().unwrap();

    let mut env = RuleSimEnv::new(obs, SimConfig::default(), 5, 60).unwrap();
    let mut policy = ScriptedPolicy::default();
    let log = run_episode("doomed", &mut env, &mut policy, &FailingWm, &AgentConfig::default());
    assert_eq!(log.steps.len(), 1);
    assert!(log.steps[0].wm_error.is_some());
    assert!(log.telemetry.is_empty());
    assert!(log.aborted.unwrap().contains("Wraith"));
}

#[test]
fn policy_failure_aborts_with_steps_retained() {
    struct Flaky(u32);
    impl Policy for Flaky {
        fn propose(&mut self, _obs: &Observation) -> Result<Vec<TimedAction>, PolicyError> {
            if self.0 == 0 {
                return Err(PolicyError("budget exhausted".to_string()));
            }
            self.0 -= 1;
            Ok(Vec::new())
        }

        fn name(&self) -> &str {
            "flaky"
        }
    }

    let scenario = &scenarios::standard_batch(9)[0];
    let cfg = SimConfig::default();
    let t0 = scenario.initial.time_s;
    let mut env = RuleSimEnv::new(scenario.initial.clone(), cfg.clone(), 5, t0 + 40).unwrap();
    let mut policy = Flaky(3);
    let wm = RuleSimPredictor { cfg };
    let log = run_episode("flaky", &mut env, &mut policy, &wm, &AgentConfig::default());
    assert_eq!(log.steps.len(), 3);
    assert_eq!(log.telemetry.len(), 15);
    assert_eq!(log.aborted.unwrap(), "policy failure: budget exhausted");
}

// ---------------------------------------------------------------------------
// Replay environment

#[test]
fn replay_env_judges_actions_without_changing_the_stream() {
    let scenario = &scenarios::standard_batch(5)[1];
    let cfg = SimConfig::default();
    let records = generate_trajectory(scenario, 30, &cfg).unwrap();
    assert_eq!(records.len(), 31);
    let t0 = records[0].t_s;

    let mut script = BTreeMap::new();
    script.insert(
        t0,
        vec![
            act(1, "Commandcenter", 1, "Commandcentertrain_scv", Target::None),
            act(2, "Marine", 9999, "Stop", Target::None),
        ],
    );
    let mut env = ReplayEnv::new(&records, 5, cfg.clone()).unwrap();
    let mut policy = ScriptedPolicy::new(script, Refiner::Identity);
    let wm = RuleSimPredictor { cfg };

    let log = run_episode(&scenario.name, &mut env, &mut policy, &wm, &AgentConfig::default());
    assert!(log.aborted.is_none());
    assert_eq!(log.steps.len(), 6);
    assert_eq!(log.telemetry.len(), 30);
    assert_eq!(log.result, MatchResult::Draw);

    let train = log.issued.iter().find(|i| i.action.command == "Commandcentertrain_scv").unwrap();
    assert!(train.valid);
    let stop = log.issued.iter().find(|i| i.action.subject_id == 9999).unwrap();
    assert!(!stop.valid);
    assert!(stop.reason.as_ref().unwrap().contains("unknown subject"));

    for (step, window) in log.steps.iter().zip(records.windows(6).step_by(5)) {
        assert_eq!(step.observation, parse_observation(&window[0].obs_text).unwrap());
    }
    log.validate().unwrap();
}

#[test]
fn replay_env_rejects_non_contiguous_records() {
    let scenario = &scenarios::standard_batch(5)[0];
    let cfg = SimConfig::default();
    let mut records = generate_trajectory(scenario, 10, &cfg).unwrap();
    records.remove(4);
    let err = match ReplayEnv::new(&records, 5, cfg) {
        Err(e) => e,
        Ok(_) => panic!("gap accepted"),
    };
    assert!(err.to_string().contains("not 1 Hz"));
}

// ---------------------------------------------------------------------------
// Match log persistence

#[test]
fn match_logs_round_trip_through_jsonl() {
    let cfg = SimConfig::default();
    let wm = RuleSimPredictor { cfg: cfg.clone() };
    let mut env = RuleSimEnv::new(cramped_base(), cfg.clone(), 5, 40).unwrap();
    let mut policy =
        ScriptedPolicy::new(marine_spam_script(40, 5), Refiner::SupplyGuard { min_unused: 3 });
    let first = run_episode("m-1", &mut env, &mut policy, &wm, &AgentConfig::default());

    let mut env = RuleSimEnv::new(cramped_base(), cfg.clone(), 5, 20).unwrap();
    let mut policy = ScriptedPolicy::new(marine_spam_script(20, 5), Refiner::Identity);
    let second = run_episode("m-2", &mut env, &mut policy, &FailingWm, &AgentConfig::default());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("matches.jsonl");
    write_match_logs(&path, &[first.clone(), second.clone()]).unwrap();
    let back = read_match_logs(&path).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[0], first);
    assert_eq!(back[1], second);
}
