//! Seeded random generators for codec and metric tests. Everything produced
//! here satisfies [`Observation::validate`] and is in canonical form, so
//! `parse(serialize(o)) == o` is expected to hold exactly.

use std::collections::BTreeSet;

use rand::Rng;

use crate::types::{
    is_worker_kind, Entity, Observation, QueueEntry, Race, SnapshotEntity, WorkerSummary,
    DEFAULT_MAP_SIZE,
};
use crate::{Target, TimedAction};

const WORKER_KINDS: [&str; 4] = ["Scv", "Probe", "Drone", "Mule"];
const ARMY_KINDS: [&str; 8] = [
    "Marine", "Marauder", "Siegetank", "Banshee", "Zealot", "Stalker", "Zergling", "Roach",
];
const STRUCTURE_KINDS: [&str; 10] = [
    "Commandcenter",
    "Orbitalcommand",
    "Barracks",
    "Factory",
    "Starport",
    "Supplydepot",
    "Supplydepotlowered",
    "Refinery",
    "Engineeringbay",
    "Missileturret",
];
const TASKS: [&str; 4] = [
    "Barrackstrain_marine",
    "Commandcentertrain_scv",
    "Factorytrain_siegetank",
    "Barrackstrain_marauder",
];
const ALERTS: [&str; 3] = [
    "UnitsUnderAttack",
    "NuclearLaunchDetected",
    "MineralsExhausted",
];
const UPGRADES: [&str; 4] = [
    "Punishergrenades",
    "Stimpack",
    "Combatshield",
    "Terraninfantryweaponslevel1",
];
const STATUSES: [&str; 4] = ["idle", "attacking", "repairing", "moving to [10, 12]"];
const RACES: [Race; 4] = [Race::Terran, Race::Protoss, Race::Zerg, Race::Unknown];
const COMMANDS: [&str; 5] = [
    "Move",
    "Attack",
    "Smartcmd",
    "Harvest_gather",
    "Barrackstrain_marine",
];

struct Ids {
    next: u32,
}

impl Ids {
    fn take(&mut self, rng: &mut impl Rng) -> u32 {
        self.next += rng.gen_range(1..7);
        self.next
    }
}

fn pick<'a>(rng: &mut impl Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn random_pos(rng: &mut impl Rng, map_size: (u32, u32)) -> (i32, i32) {
    (
        rng.gen_range(0..=map_size.0) as i32,
        rng.gen_range(0..=map_size.1) as i32,
    )
}

fn random_entity(rng: &mut impl Rng, ids: &mut Ids, kind: &str, map_size: (u32, u32)) -> Entity {
    Entity {
        id: ids.take(rng),
        kind: kind.to_string(),
        pos: random_pos(rng, map_size),
        hp_pct: rng.gen_range(1..=100),
        energy_pct: if rng.gen_bool(0.25) {
            Some(rng.gen_range(0..=100))
        } else {
            None
        },
        status: if rng.gen_bool(0.4) {
            Some(pick(rng, &STATUSES).to_string())
        } else {
            None
        },
    }
}

fn random_set(rng: &mut impl Rng, pool: &[&str], max: usize) -> BTreeSet<String> {
    let n = rng.gen_range(0..=max.min(pool.len()));
    let mut set = BTreeSet::new();
    while set.len() < n {
        set.insert(pick(rng, pool).to_string());
    }
    set
}

/// Generates a structurally valid observation in canonical form.
pub fn random_observation(rng: &mut impl Rng) -> Observation {
    let map_size = match rng.gen_range(0..4) {
        0 => DEFAULT_MAP_SIZE,
        1 => (64, 64),
        2 => (88, 96),
        _ => (128, 128),
    };
    let mut ids = Ids { next: 0 };
    let mut obs = Observation::empty(rng.gen_range(0..3600));
    obs.race = RACES[rng.gen_range(0..RACES.len())].clone();
    obs.enemy_race = RACES[rng.gen_range(0..RACES.len())].clone();
    obs.map_name = ["Flat64", "Simple64", "AbyssalReef"][rng.gen_range(0..3)].to_string();
    obs.map_size = map_size;
    obs.minerals = rng.gen_range(0..5000);
    obs.minerals_rate = rng.gen_range(0..4000);
    obs.gas = rng.gen_range(0..3000);
    obs.gas_rate = rng.gen_range(0..1500);
    obs.supply_army = rng.gen_range(0..80);
    obs.supply_workers = rng.gen_range(0..80);
    obs.supply_used = obs.supply_army + obs.supply_workers;
    obs.supply_cap = rng.gen_range(0..=200);
    obs.alerts = random_set(rng, &ALERTS, 2);
    obs.upgrades = random_set(rng, &UPGRADES, 3);

    let mut workers = WorkerSummary::default();
    for _ in 0..rng.gen_range(0..30) {
        workers.mining.insert(ids.take(rng));
    }
    for _ in 0..rng.gen_range(0..3) {
        workers.mule.insert(ids.take(rng));
    }
    obs.workers = workers;

    for _ in 0..rng.gen_range(0..6) {
        let constructing = rng.gen_bool(0.3);
        let (owner_kind, task) = if constructing {
            let kind = pick(rng, &STRUCTURE_KINDS).to_string();
            (kind.clone(), kind)
        } else {
            (
                pick(rng, &STRUCTURE_KINDS).to_string(),
                pick(rng, &TASKS).to_string(),
            )
        };
        obs.queue.push(QueueEntry {
            owner_id: ids.take(rng),
            owner_kind,
            pos: random_pos(rng, map_size),
            task,
            progress_pct: rng.gen_range(0..100),
            is_construction: constructing,
        });
    }

    for _ in 0..rng.gen_range(0..4) {
        let kind = pick(rng, &WORKER_KINDS);
        obs.my_units.push(random_entity(rng, &mut ids, kind, map_size));
    }
    for _ in 0..rng.gen_range(0..8) {
        let kind = pick(rng, &ARMY_KINDS);
        obs.my_units.push(random_entity(rng, &mut ids, kind, map_size));
    }
    for _ in 0..rng.gen_range(0..8) {
        let kind = pick(rng, &STRUCTURE_KINDS);
        obs.my_structures
            .push(random_entity(rng, &mut ids, kind, map_size));
    }
    for _ in 0..rng.gen_range(0..6) {
        let kind = if rng.gen_bool(0.3) {
            pick(rng, &WORKER_KINDS)
        } else {
            pick(rng, &ARMY_KINDS)
        };
        obs.enemy_units
            .push(random_entity(rng, &mut ids, kind, map_size));
    }
    for _ in 0..rng.gen_range(0..5) {
        let kind = pick(rng, &STRUCTURE_KINDS);
        obs.enemy_structures
            .push(random_entity(rng, &mut ids, kind, map_size));
    }
    for _ in 0..rng.gen_range(0..5) {
        obs.snapshot_enemy_structures.push(SnapshotEntity {
            kind: pick(rng, &STRUCTURE_KINDS).to_string(),
            pos: random_pos(rng, map_size),
        });
    }

    debug_assert_eq!(obs.validate(), Ok(()));
    obs
}

/// Generates a random action sequence with offsets in `(0, max_offset_ds]`,
/// nondecreasing, referencing arbitrary subjects.
pub fn random_actions(rng: &mut impl Rng, max_offset_ds: u32) -> Vec<TimedAction> {
    let count = rng.gen_range(0..12);
    let mut offsets: Vec<u32> = (0..count)
        .map(|_| rng.gen_range(1..=max_offset_ds.max(1)))
        .collect();
    offsets.sort_unstable();
    offsets
        .into_iter()
        .map(|t_offset_ds| {
            let kind = if rng.gen_bool(0.5) {
                pick(rng, &WORKER_KINDS)
            } else {
                pick(rng, &ARMY_KINDS)
            };
            let command = pick(rng, &COMMANDS).to_string();
            let target = match rng.gen_range(0..3) {
                0 => Target::None,
                1 => Target::Point(rng.gen_range(0..100), rng.gen_range(0..100)),
                _ => Target::Entity {
                    kind: pick(rng, &STRUCTURE_KINDS).to_string(),
                    id: rng.gen_range(1..400),
                },
            };
            TimedAction {
                t_offset_ds,
                subject_kind: kind.to_string(),
                subject_id: rng.gen_range(1..400),
                command,
                target,
            }
        })
        .collect()
}

/// True when every worker-kind entity precedes every army entity in
/// `my_units` (the canonical order the serializer emits).
pub fn units_in_canonical_order(obs: &Observation) -> bool {
    let mut seen_army = false;
    for e in &obs.my_units {
        if is_worker_kind(&e.kind) {
            if seen_army {
                return false;
            }
        } else {
            seen_army = true;
        }
    }
    true
}
