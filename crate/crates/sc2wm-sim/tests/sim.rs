use sc2wm_obs::{
    parse_action_line, parse_observation, Entity, Observation, QueueEntry, Target, TimedAction,
};
use sc2wm_sim::{
    generate_trajectory, scenarios, simulate, simulate_logged, SimConfig, SimError, SimEvent,
    UnitTable,
};

fn act(t_ds: u32, kind: &str, id: u32, command: &str, target: Target) -> TimedAction {
    TimedAction {
        t_offset_ds: t_ds,
        subject_kind: kind.to_string(),
        subject_id: id,
        command: command.to_string(),
        target,
    }
}

/// A tiny table with round numbers, for tests that pin exact arithmetic.
fn custom_table() -> UnitTable {
    UnitTable::from_json(
        r#"{
          "version": "test",
          "units": [
            {"kind": "Commandcenter", "mineral_cost": 400, "gas_cost": 0, "supply_cost": 0,
             "supply_provided": 15, "build_time_s": 100, "speed": 0.0, "dps": 0.0,
             "max_hp": 1500, "sight": 11.0, "is_structure": true},
            {"kind": "Supplydepot", "mineral_cost": 100, "gas_cost": 0, "supply_cost": 0,
             "supply_provided": 8, "build_time_s": 30, "speed": 0.0, "dps": 0.0,
             "max_hp": 400, "sight": 8.0, "is_structure": true},
            {"kind": "Scv", "mineral_cost": 50, "gas_cost": 0, "supply_cost": 1,
             "supply_provided": 0, "build_time_s": 17, "speed": 3.94, "dps": 6.5,
             "max_hp": 45, "sight": 8.0, "is_structure": false},
            {"kind": "Testling", "mineral_cost": 25, "gas_cost": 0, "supply_cost": 1,
             "supply_provided": 0, "build_time_s": 14, "speed": 0.0, "dps": 0.0,
             "max_hp": 10, "sight": 8.0, "is_structure": true},
            {"kind": "Walker", "mineral_cost": 0, "gas_cost": 0, "supply_cost": 0,
             "supply_provided": 0, "build_time_s": 10, "speed": 3.0, "dps": 0.0,
             "max_hp": 100, "sight": 20.0, "is_structure": false}
          ]
        }"#
        .as_bytes(),
    )
    .unwrap()
}

fn custom_cfg() -> SimConfig {
    SimConfig { units: custom_table(), ..SimConfig::default() }
}

fn base_obs() -> Observation {
    let mut obs = Observation::empty(0);
    obs.my_structures.push(Entity::new(1, "Commandcenter", (30, 30), 100));
    obs.workers.mining.insert(10);
    obs.supply_used = 1;
    obs.supply_workers = 1;
    obs.supply_cap = 15;
    obs
}

#[test]
fn floor_accrual_minus_cost_matches_worked_example() {
    let mut obs = base_obs();
    obs.minerals = 280;
    obs.minerals_rate = 2575;
    let depot = act(1, "Scv", 10, "Build_supplydepot", Target::Point(24, 30));
    let out = simulate(&obs, &[depot], 5, &custom_cfg()).unwrap();
    assert_eq!(out.minerals, 280 + 214 - 100);
    assert_eq!(out.time_s, 5);
}

#[test]
fn accrual_floors_per_absolute_second_not_per_call() {
    let mut obs = base_obs();
    obs.minerals = 0;
    obs.minerals_rate = 50;
    // 50/min is 5/6 per second: whole minerals only land when the floor of
    // rate * t / 60 steps, so one-second calls must agree with one big call.
    let big = simulate(&obs, &[], 12, &custom_cfg()).unwrap();
    let mut small = obs.clone();
    for _ in 0..12 {
        small = simulate(&small, &[], 1, &custom_cfg()).unwrap();
    }
    assert_eq!(big.minerals, 10);
    assert_eq!(small, big);
}

#[test]
fn queue_progress_matches_worked_example() {
    let mut obs = base_obs();
    obs.queue.push(QueueEntry {
        owner_id: 50,
        owner_kind: "Testling".to_string(),
        pos: (20, 20),
        task: "Testling".to_string(),
        progress_pct: 34,
        is_construction: true,
    });
    let out = simulate(&obs, &[], 5, &custom_cfg()).unwrap();
    assert_eq!(out.queue.len(), 1);
    assert_eq!(out.queue[0].progress_pct, 84);
}

#[test]
fn movement_clamps_at_destination() {
    let mut obs = base_obs();
    obs.my_units.push(Entity::new(20, "Walker", (0, 0), 100));
    let go = act(1, "Walker", 20, "Move", Target::Point(10, 0));

    let part = simulate(&obs, &[go.clone()], 2, &custom_cfg()).unwrap();
    assert_eq!(part.my_units[0].pos, (6, 0));
    assert_eq!(part.my_units[0].status.as_deref(), Some("moving to [10, 0]"));

    let done = simulate(&obs, &[go], 5, &custom_cfg()).unwrap();
    assert_eq!(done.my_units[0].pos, (10, 0));
    assert_eq!(done.my_units[0].status, None);
}

#[test]
fn construction_spawns_structure_and_raises_cap() {
    let mut obs = base_obs();
    obs.minerals = 120;
    let depot = act(3, "Scv", 10, "Build_supplydepot", Target::Point(24, 30));
    // Depot: nominal 30 s, so 5 points per second starting the substep after
    // the order; 100 points at t=21.
    let out = simulate_logged(&obs, &[depot], 25, &custom_cfg()).unwrap();
    assert!(out.actions[0].accepted);
    let depot = out
        .obs
        .my_structures
        .iter()
        .find(|s| s.kind == "Supplydepot")
        .expect("depot completed");
    assert_eq!(depot.pos, (24, 30));
    assert_eq!(out.obs.supply_cap, 15 + 8);
    assert!(out.obs.queue.is_empty());
    assert!(out
        .events
        .iter()
        .any(|e| matches!(e, SimEvent::Completed { kind, t_s: 21, .. } if kind == "Supplydepot")));
}

#[test]
fn trained_worker_joins_mining_and_raises_income() {
    let mut obs = base_obs();
    obs.minerals = 50;
    obs.minerals_rate = 60;
    let train = act(1, "Commandcenter", 1, "Commandcentertrain_scv", Target::None);
    // SCV: nominal 17 s, 8 points per second, completes at t=14.
    let out = simulate(&obs, &[train], 15, &custom_cfg()).unwrap();
    assert_eq!(out.workers.mining.len(), 2);
    assert_eq!(out.minerals_rate, 120);
    assert_eq!(out.supply_used, 2);
    assert_eq!(out.supply_workers, 2);
}

#[test]
fn supply_block_rejects_then_depot_unblocks() {
    let mut obs = Observation::empty(0);
    obs.minerals = 400;
    obs.minerals_rate = 720;
    obs.my_structures.push(Entity::new(1, "Commandcenter", (30, 30), 100));
    obs.my_structures.push(Entity::new(2, "Supplydepot", (26, 28), 100));
    obs.my_structures.push(Entity::new(3, "Barracks", (34, 28), 100));
    for w in 10..22 {
        obs.workers.mining.insert(w);
    }
    for m in 0..10 {
        obs.my_units.push(Entity::new(30 + m, "Marine", (38 + (m as i32 % 3), 29 + (m as i32 / 3)), 100));
    }
    obs.supply_workers = 12;
    obs.supply_army = 10;
    obs.supply_used = 22;
    obs.supply_cap = 23;

    let actions = vec![
        act(15, "Barracks", 3, "Barrackstrain_marine", Target::None),
        act(25, "Barracks", 3, "Barrackstrain_marine", Target::None),
        act(32, "Scv", 10, "Build_supplydepot", Target::Point(25, 33)),
        act(250, "Barracks", 3, "Barrackstrain_marine", Target::None),
    ];
    let out = simulate_logged(&obs, &actions, 30, &SimConfig::default()).unwrap();
    let flags: Vec<bool> = out.actions.iter().map(|a| a.accepted).collect();
    assert_eq!(flags, vec![true, false, true, true]);
    assert!(out.actions[1].reason.as_deref().unwrap().contains("supply"));
    assert_eq!(out.obs.supply_cap, 31);
    assert_eq!(out.obs.supply_used, 24);
    // First marine is out; the post-depot one is still training.
    assert_eq!(out.obs.my_units.len(), 11);
    assert_eq!(out.obs.queue.len(), 1);
}

#[test]
fn orbital_upgrade_swaps_kind_and_keeps_cap() {
    let mut obs = base_obs();
    obs.minerals = 150;
    let morph = act(5, "Commandcenter", 1, "Upgradetoorbital_orbitalcommand", Target::None);
    let out = simulate_logged(&obs, &[morph], 30, &SimConfig::default()).unwrap();
    assert!(out.actions[0].accepted);
    assert_eq!(out.obs.my_structures[0].kind, "Orbitalcommand");
    assert_eq!(out.obs.my_structures[0].id, 1);
    assert_eq!(out.obs.supply_cap, 15);
    assert_eq!(out.obs.minerals, 0);
    assert!(out.obs.queue.is_empty());
}

#[test]
fn depot_lower_and_raise_swap_instantly() {
    let mut obs = base_obs();
    obs.my_structures.push(Entity::new(2, "Supplydepot", (26, 28), 100));
    let lower = act(3, "Supplydepot", 2, "Morph_supplydepot_lower", Target::None);
    let out = simulate(&obs, &[lower], 1, &SimConfig::default()).unwrap();
    assert_eq!(out.my_structures[1].kind, "Supplydepotlowered");
    let raise = act(2, "Supplydepotlowered", 2, "Morph_supplydepot_raise", Target::None);
    let back = simulate(&out, &[raise], 1, &SimConfig::default()).unwrap();
    assert_eq!(back.my_structures[1].kind, "Supplydepot");
}

#[test]
fn invalid_actions_are_dropped_with_reasons_not_errors() {
    let mut obs = base_obs();
    obs.minerals = 10;
    let actions = vec![
        act(1, "Marine", 999, "Attack", Target::Point(5, 5)),
        act(2, "Commandcenter", 1, "Commandcentertrain_scv", Target::None),
        act(3, "Scv", 10, "Build_fusioncore", Target::Point(24, 30)),
        act(25, "Commandcenter", 1, "Commandcentertrain_scv", Target::None),
    ];
    let out = simulate_logged(&obs, &actions, 1, &custom_cfg()).unwrap();
    let reasons: Vec<&str> =
        out.actions.iter().map(|a| a.reason.as_deref().unwrap_or("")).collect();
    assert!(reasons[0].contains("unknown subject id 999"));
    assert!(reasons[1].contains("insufficient resources"));
    assert!(reasons[2].contains("unknown product"));
    assert!(reasons[3].contains("beyond simulation horizon"));
    assert!(out.actions.iter().all(|a| !a.accepted));
    assert_eq!(out.warnings.len(), 4);
}

#[test]
fn smart_and_unmodeled_commands_are_accepted_noops() {
    let mut obs = base_obs();
    obs.my_units.push(Entity::new(20, "Scv", (32, 30), 100));
    obs.supply_used = 2;
    obs.supply_workers = 2;
    let before = obs.clone();
    let actions = vec![
        act(1, "Scv", 20, "Smartcmd", Target::Point(40, 40)),
        act(2, "Scv", 10, "Harvest_gather", Target::Entity { kind: "Mineralfield".into(), id: 500 }),
        act(3, "Scv", 20, "Effect_repair", Target::Entity { kind: "Commandcenter".into(), id: 1 }),
    ];
    let out = simulate_logged(&obs, &actions, 1, &custom_cfg()).unwrap();
    assert!(out.actions.iter().all(|a| a.accepted));
    assert_eq!(out.obs.my_units, before.my_units);
}

#[test]
fn combat_attrition_removes_weaker_side_first() {
    let mut obs = Observation::empty(0);
    obs.my_structures.push(Entity::new(1, "Commandcenter", (30, 30), 100));
    for m in 0..8 {
        obs.my_units.push(Entity::new(30 + m, "Marine", (38 + (m as i32 % 3), 29 + (m as i32 / 3)), 100));
    }
    for z in 0..4 {
        obs.enemy_units.push(Entity::new(60 + z, "Zergling", (46 + (z as i32 % 2), 29 + (z as i32 / 2)), 100));
    }
    obs.supply_army = 8;
    obs.supply_used = 8;
    obs.supply_cap = 15;

    let actions: Vec<TimedAction> = (0..8)
        .map(|k| act(12 + 2 * k, "Marine", 30 + k, "Attack", Target::Point(46, 30)))
        .collect();
    let out = simulate_logged(&obs, &actions, 15, &SimConfig::default()).unwrap();
    assert!(out.obs.enemy_units.is_empty(), "zerglings wiped");
    let survivors = out.obs.my_units.len();
    assert!(survivors >= 5, "marines mostly survive, got {survivors}");
    let enemy_kills: Vec<_> = out
        .events
        .iter()
        .filter(|e| matches!(e, SimEvent::UnitKilled { mine: false, .. }))
        .collect();
    assert_eq!(enemy_kills.len(), 4);
    assert!(enemy_kills.iter().all(
        |e| matches!(e, SimEvent::UnitKilled { kind, value: 25, is_army: true, .. } if kind == "Zergling")
    ));
    assert_eq!(out.obs.supply_army as usize, survivors);
}

#[test]
fn fog_drops_units_and_snapshots_structures() {
    let mut obs = Observation::empty(0);
    obs.my_units.push(Entity::new(30, "Marine", (42, 30), 100));
    obs.enemy_units.push(Entity::new(60, "Zergling", (50, 30), 100));
    obs.enemy_structures.push(Entity::new(61, "Hatchery", (48, 36), 100));
    obs.supply_army = 1;
    obs.supply_used = 1;
    obs.supply_cap = 15;

    let retreat = act(1, "Marine", 30, "Move", Target::Point(10, 30));
    let out = simulate(&obs, &[retreat], 8, &SimConfig::default()).unwrap();
    assert!(out.enemy_units.is_empty(), "unseen enemy units vanish");
    assert!(out.enemy_structures.is_empty());
    assert_eq!(out.snapshot_enemy_structures.len(), 1);
    assert_eq!(out.snapshot_enemy_structures[0].kind, "Hatchery");
    assert_eq!(out.snapshot_enemy_structures[0].pos, (48, 36));

    // Scouting the position again turns the snapshot back into a live
    // structure (with a fresh id, since snapshots carry none).
    let back = act(1, "Marine", 30, "Move", Target::Point(47, 35));
    let scouted = simulate(&out, &[back], 10, &SimConfig::default()).unwrap();
    assert!(scouted.snapshot_enemy_structures.is_empty());
    assert_eq!(scouted.enemy_structures.len(), 1);
    assert_eq!(scouted.enemy_structures[0].kind, "Hatchery");
    assert_eq!(scouted.enemy_structures[0].pos, (48, 36));
}

#[test]
fn five_second_step_equals_chained_seconds() {
    let cfg = SimConfig::default();
    for scenario in scenarios::standard_batch(7) {
        let first5: Vec<TimedAction> =
            scenario.actions.iter().filter(|a| a.substep() < 5).cloned().collect();
        let single = simulate(&scenario.initial, &first5, 5, &cfg).unwrap();
        let mut chained = scenario.initial.clone();
        for k in 0..5 {
            let second: Vec<TimedAction> = first5
                .iter()
                .filter(|a| a.substep() == k)
                .map(|a| TimedAction { t_offset_ds: a.t_offset_ds - k * 10, ..a.clone() })
                .collect();
            chained = simulate(&chained, &second, 1, &cfg).unwrap();
        }
        assert_eq!(single, chained, "{} diverged", scenario.name);
    }
}

#[test]
fn conservation_minerals_balance_exactly_per_step() {
    let cfg = SimConfig::default();
    let scenario = &scenarios::standard_batch(13)[1];
    let mut obs = scenario.initial.clone();
    for k in 0..60 {
        let second: Vec<TimedAction> = scenario
            .actions
            .iter()
            .filter(|a| a.substep() == k)
            .map(|a| TimedAction { t_offset_ds: a.t_offset_ds - k * 10, ..a.clone() })
            .collect();
        let before = obs.clone();
        let out = simulate_logged(&before, &second, 1, &cfg).unwrap();
        let t1 = (before.time_s + 1) as u64;
        let t0 = before.time_s as u64;
        let accrued =
            (before.minerals_rate as u64 * t1 / 60 - before.minerals_rate as u64 * t0 / 60) as u32;
        let spent: u32 = out
            .actions
            .iter()
            .filter(|a| a.accepted)
            .map(|a| {
                let cmd = &a.action.command;
                let product = cmd
                    .find("train_")
                    .map(|at| &cmd[at + 6..])
                    .or_else(|| cmd.strip_prefix("Build_"))
                    .unwrap_or("");
                cfg.units.get_ci(product).map_or(0, |s| s.mineral_cost)
            })
            .sum();
        assert_eq!(out.obs.minerals, before.minerals + accrued - spent, "t={}", t1);
        obs = out.obs;
    }
}

#[test]
fn quiescent_world_keeps_entities_bit_identical() {
    let cfg = SimConfig::default();
    let scenario = &scenarios::standard_batch(5)[0];
    let before = &scenario.initial;
    let after = simulate(before, &[], 10, &cfg).unwrap();
    assert_eq!(after.time_s, before.time_s + 10);
    assert!(after.minerals > before.minerals);
    assert_eq!(after.my_units, before.my_units);
    assert_eq!(after.my_structures, before.my_structures);
    assert_eq!(after.queue, before.queue);
    assert_eq!(after.workers, before.workers);
    assert_eq!(after.alerts, before.alerts);
    assert_eq!(after.upgrades, before.upgrades);
    assert_eq!(after.supply_used, before.supply_used);
    assert_eq!(after.supply_cap, before.supply_cap);
}

#[test]
fn trajectory_pairs_satisfy_one_step_simulation() {
    let cfg = SimConfig::default();
    for scenario in scenarios::standard_batch(3).iter().take(4) {
        let records = generate_trajectory(scenario, 60, &cfg).unwrap();
        assert_eq!(records.len(), 61);
        for pair in records.windows(2) {
            let o0 = parse_observation(&pair[0].obs_text).unwrap();
            let o1 = parse_observation(&pair[1].obs_text).unwrap();
            let actions: Vec<TimedAction> = pair[1]
                .actions
                .iter()
                .enumerate()
                .map(|(i, line)| parse_action_line(line, i + 1).unwrap())
                .collect();
            let stepped = simulate(&o0, &actions, 1, &cfg).unwrap();
            assert_eq!(stepped, o1, "{} t={}", scenario.name, pair[1].t_s);
        }
    }
}

#[test]
fn trajectory_generation_is_deterministic() {
    let cfg = SimConfig::default();
    let a = scenarios::standard_batch(42);
    let b = scenarios::standard_batch(42);
    assert_eq!(a, b);
    let ta = generate_trajectory(&a[2], 30, &cfg).unwrap();
    let tb = generate_trajectory(&b[2], 30, &cfg).unwrap();
    assert_eq!(ta, tb);
}

#[test]
fn scenario_json_round_trips() {
    let scenario = &scenarios::standard_batch(9)[3];
    let mut buf = Vec::new();
    scenario.to_json(&mut buf).unwrap();
    let parsed = sc2wm_sim::ScriptedScenario::from_json(buf.as_slice()).unwrap();
    assert_eq!(&parsed, scenario);
}

#[test]
fn errors_surface_for_bad_inputs() {
    let cfg = custom_cfg();
    let mut bad_kind = base_obs();
    bad_kind.my_units.push(Entity::new(20, "Banshee", (30, 30), 100));
    bad_kind.supply_used = 2;
    bad_kind.supply_army = 1;
    assert_eq!(
        simulate(&bad_kind, &[], 1, &cfg),
        Err(SimError::UnknownKind { kind: "Banshee".to_string() })
    );

    assert_eq!(simulate(&base_obs(), &[], 0, &cfg), Err(SimError::ZeroHorizon));

    let mut inconsistent = base_obs();
    inconsistent.supply_used = 5;
    assert!(matches!(
        simulate(&inconsistent, &[], 1, &cfg),
        Err(SimError::InvalidObservation { .. })
    ));

    let mut broken = SimConfig::default();
    broken.game_speed = 0.0;
    assert!(matches!(
        simulate(&base_obs(), &[], 1, &broken),
        Err(SimError::InvalidConfig { .. })
    ));
}

#[test]
fn frozen_table_matches_bundled() {
    let frozen = UnitTable::from_json(
        std::fs::File::open(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/frozen_units.json"))
            .unwrap(),
    )
    .unwrap();
    assert_eq!(frozen, UnitTable::bundled());
    assert_eq!(frozen.get_ci("siegetank").unwrap().kind, "Siegetank");
    assert!(frozen.get("Marine").unwrap().dps > 0.0);
}

#[test]
fn progress_per_second_rounds_and_floors_at_one() {
    let cfg = SimConfig::default();
    assert_eq!(cfg.progress_per_second(14), 10);
    assert_eq!(cfg.progress_per_second(17), 8);
    assert_eq!(cfg.progress_per_second(25), 6);
    assert_eq!(cfg.progress_per_second(1000), 1);
    assert_eq!(cfg.progress_per_second(0), 100);
    assert!((cfg.effective_build_time(14) - 10.0).abs() < 1e-12);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        /// Every observation a scenario trajectory emits stays valid and
        /// parseable, whatever the seed.
        #[test]
        fn batch_trajectories_stay_valid(seed in 0u64..10_000) {
            let cfg = SimConfig::default();
            for scenario in scenarios::standard_batch(seed).into_iter().step_by(7) {
                let records = generate_trajectory(&scenario, 20, &cfg).unwrap();
                for record in &records {
                    let obs = parse_observation(&record.obs_text).unwrap();
                    prop_assert_eq!(obs.validate(), Ok(()));
                }
            }
        }

        /// Simulation output is a function of its inputs alone.
        #[test]
        fn simulate_is_deterministic(seed in 0u64..10_000, delta in 1u32..8) {
            let cfg = SimConfig::default();
            let scenario = &scenarios::standard_batch(seed)[1];
            let acts: Vec<TimedAction> = scenario
                .actions
                .iter()
                .filter(|a| a.substep() < delta)
                .cloned()
                .collect();
            let a = simulate(&scenario.initial, &acts, delta, &cfg).unwrap();
            let b = simulate(&scenario.initial, &acts, delta, &cfg).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
