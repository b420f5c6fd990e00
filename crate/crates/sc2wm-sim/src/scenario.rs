use std::io::{Read, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use sc2wm_obs::{
    parse_action_line, parse_observation, serialize_observation, Entity, Observation, Race,
    SnapshotEntity, Target, TimedAction, TrajectoryMeta, TrajectoryRecord,
};

use crate::sim::{simulate_logged, SimError};
use crate::spec::SimConfig;

/// A deterministic synthetic match: an initial observation plus a script of
/// timed actions, offsets in deciseconds from the scenario start.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedScenario {
    pub name: String,
    pub player_id: u32,
    pub initial: Observation,
    pub actions: Vec<TimedAction>,
}

/// On-disk form: observation text and canonical action lines, so scenario
/// files stay hand-editable.
#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    name: String,
    player_id: u32,
    initial_obs: String,
    actions: Vec<String>,
}

impl ScriptedScenario {
    pub fn validate(&self) -> Result<(), String> {
        self.initial.validate()?;
        for a in &self.actions {
            if a.t_offset_ds == 0 {
                return Err(format!("action offsets must be positive: [{a}]"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, mut w: impl Write) -> Result<(), String> {
        let file = ScenarioFile {
            name: self.name.clone(),
            player_id: self.player_id,
            initial_obs: serialize_observation(&self.initial),
            actions: self.actions.iter().map(|a| a.to_string()).collect(),
        };
        let text = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
        w.write_all(text.as_bytes()).map_err(|e| e.to_string())
    }

    pub fn from_json(reader: impl Read) -> Result<ScriptedScenario, String> {
        let file: ScenarioFile =
            serde_json::from_reader(reader).map_err(|e| format!("scenario: {e}"))?;
        let initial = parse_observation(&file.initial_obs).map_err(|e| e.to_string())?;
        let actions = file
            .actions
            .iter()
            .enumerate()
            .map(|(i, line)| parse_action_line(line, i + 1).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let scenario = ScriptedScenario { name: file.name, player_id: file.player_id, initial, actions };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Runs a scenario forward one second at a time, producing a 1 Hz trajectory.
///
/// Record `t` carries the observation at `t` and the canonical lines of the
/// actions issued during `(t-1, t]`, rebased to local offsets in `(0.0, 1.0]`,
/// so every consecutive record pair satisfies
/// `simulate(o_t, a_{t+1}, 1) == o_{t+1}`.
pub fn generate_trajectory(
    scenario: &ScriptedScenario,
    length_s: u32,
    cfg: &SimConfig,
) -> Result<Vec<TrajectoryRecord>, SimError> {
    scenario
        .validate()
        .map_err(|detail| SimError::InvalidObservation { detail })?;
    let meta = TrajectoryMeta {
        trajectory_id: scenario.name.clone(),
        player_id: scenario.player_id,
        map: scenario.initial.map_name.clone(),
        opponent_level: 0,
        result: String::new(),
    };
    let mut obs = scenario.initial.clone();
    let mut records = vec![TrajectoryRecord {
        t_s: obs.time_s,
        obs_text: serialize_observation(&obs),
        actions: Vec::new(),
        meta: meta.clone(),
    }];
    for k in 0..length_s {
        let second: Vec<TimedAction> = scenario
            .actions
            .iter()
            .filter(|a| a.substep() == k)
            .map(|a| TimedAction { t_offset_ds: a.t_offset_ds - k * 10, ..a.clone() })
            .collect();
        obs = simulate_logged(&obs, &second, 1, cfg)?.obs;
        records.push(TrajectoryRecord {
            t_s: obs.time_s,
            obs_text: serialize_observation(&obs),
            actions: second.iter().map(|a| a.to_string()).collect(),
            meta: meta.clone(),
        });
    }
    Ok(records)
}

/// Prebuilt scenario families used by tests and the demo corpus.
pub mod scenarios {
    use super::*;

    fn act(t_ds: u32, kind: &str, id: u32, command: &str, target: Target) -> TimedAction {
        TimedAction {
            t_offset_ds: t_ds,
            subject_kind: kind.to_string(),
            subject_id: id,
            command: command.to_string(),
            target,
        }
    }

    /// A small Terran main: command center, depot, barracks, a dozen miners,
    /// and a marine squad. Supply comes out consistent with the roster.
    fn terran_base(rng: &mut ChaCha20Rng) -> Observation {
        let mut obs = Observation::empty(rng.gen_range(0..120));
        obs.race = Race::Terran;
        obs.enemy_race = Race::Zerg;
        obs.map_name = "Flat64".to_string();
        obs.map_size = (64, 64);
        obs.minerals = rng.gen_range(300..600);
        obs.gas = rng.gen_range(0..200);
        obs.gas_rate = 0;

        obs.my_structures.push(Entity::new(1, "Commandcenter", (30, 30), 100));
        obs.my_structures.push(Entity::new(2, "Supplydepot", (26, 28), 100));
        obs.my_structures.push(Entity::new(3, "Barracks", (34, 28), 100));

        let n_workers = rng.gen_range(10..=14);
        for w in 0..n_workers {
            obs.workers.mining.insert(10 + w);
        }
        obs.minerals_rate = n_workers * 60;

        let n_marines = rng.gen_range(4..=8);
        for m in 0..n_marines {
            let pos = (38 + (m as i32 % 3), 29 + (m as i32 / 3));
            obs.my_units.push(Entity::new(30 + m, "Marine", pos, 100));
        }

        obs.supply_workers = n_workers;
        obs.supply_army = n_marines;
        obs.supply_used = n_workers + n_marines;
        obs.supply_cap = 15 + 8;
        obs
    }

    /// No actions, no enemies: the economy ticks and everything else holds.
    pub fn quiescent(rng: &mut ChaCha20Rng, index: usize) -> ScriptedScenario {
        let mut initial = terran_base(rng);
        initial.upgrades.insert("Stimpack".to_string());
        ScriptedScenario {
            name: format!("quiescent-{index}"),
            player_id: 1,
            initial,
            actions: Vec::new(),
        }
    }

    /// Steady production: SCVs and marines on repeat, one extra depot, and a
    /// late barracks so construction and supply effects both appear.
    pub fn build_order(rng: &mut ChaCha20Rng, index: usize) -> ScriptedScenario {
        let initial = terran_base(rng);
        let jitter = rng.gen_range(0..40);
        let mut actions = Vec::new();
        for k in 0..14u32 {
            actions.push(act(
                30 + jitter + 200 * k,
                "Commandcenter",
                1,
                "Commandcentertrain_scv",
                Target::None,
            ));
        }
        for k in 0..16u32 {
            actions.push(act(
                85 + jitter + 160 * k,
                "Barracks",
                3,
                "Barrackstrain_marine",
                Target::None,
            ));
        }
        actions.push(act(
            205 + jitter,
            "Scv",
            10,
            "Build_supplydepot",
            Target::Point(24, 31),
        ));
        actions.push(act(
            1100 + jitter,
            "Scv",
            11,
            "Build_barracks",
            Target::Point(37, 26),
        ));
        ScriptedScenario {
            name: format!("build-order-{index}"),
            player_id: 1,
            initial,
            actions,
        }
    }

    /// Marines against an approaching zergling pack, with fogged enemy
    /// structures on the map edge.
    pub fn engagement(rng: &mut ChaCha20Rng, index: usize) -> ScriptedScenario {
        let mut initial = terran_base(rng);
        let n_lings = rng.gen_range(5..=9);
        for z in 0..n_lings {
            let pos = (46 + (z as i32 % 2), 29 + (z as i32 / 2));
            initial.enemy_units.push(Entity::new(60 + z, "Zergling", pos, 100));
        }
        initial
            .snapshot_enemy_structures
            .push(SnapshotEntity { kind: "Hatchery".to_string(), pos: (56, 48) });
        initial
            .snapshot_enemy_structures
            .push(SnapshotEntity { kind: "Spawningpool".to_string(), pos: (59, 51) });

        let marine_ids: Vec<u32> = initial.my_units.iter().map(|e| e.id).collect();
        let mut actions = Vec::new();
        for (k, id) in marine_ids.iter().enumerate() {
            actions.push(act(
                12 + 2 * k as u32,
                "Marine",
                *id,
                "Attack",
                Target::Point(46, 30),
            ));
        }
        ScriptedScenario {
            name: format!("engagement-{index}"),
            player_id: 1,
            initial,
            actions,
        }
    }

    /// Starts one marine short of the cap: early train orders bounce off the
    /// supply block until a scripted depot finishes.
    pub fn supply_constrained(rng: &mut ChaCha20Rng, index: usize) -> ScriptedScenario {
        let mut initial = terran_base(rng);
        let cap = initial.supply_cap;
        while initial.supply_used + 1 < cap {
            let id = 30 + initial.my_units.len() as u32;
            let k = initial.my_units.len() as i32;
            initial
                .my_units
                .push(Entity::new(id, "Marine", (38 + k % 3, 29 + k / 3), 100));
            initial.supply_army += 1;
            initial.supply_used += 1;
        }
        let mut actions = vec![act(15, "Barracks", 3, "Barrackstrain_marine", Target::None)];
        for k in 0..6u32 {
            actions.push(act(
                240 + 150 * k,
                "Barracks",
                3,
                "Barrackstrain_marine",
                Target::None,
            ));
        }
        actions.push(act(32, "Scv", 10, "Build_supplydepot", Target::Point(25, 33)));
        ScriptedScenario {
            name: format!("supply-constrained-{index}"),
            player_id: 1,
            initial,
            actions,
        }
    }

    /// The standard mixed batch: five scenarios from each family, all
    /// reproducible from the seed.
    pub fn standard_batch(seed: u64) -> Vec<ScriptedScenario> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut batch = Vec::with_capacity(20);
        for i in 0..5 {
            batch.push(quiescent(&mut rng, i));
            batch.push(build_order(&mut rng, i));
            batch.push(engagement(&mut rng, i));
            batch.push(supply_constrained(&mut rng, i));
        }
        batch
    }
}
