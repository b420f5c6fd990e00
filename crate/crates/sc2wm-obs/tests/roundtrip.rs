use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use sc2wm_obs::testing::{random_actions, random_observation, units_in_canonical_order};
use sc2wm_obs::{
    is_worker_kind, parse_actions, parse_observation, serialize_action, serialize_observation,
    ParseError, Race, Target, DEFAULT_MAP_SIZE,
};

const MIDGAME: &str = include_str!("fixtures/terran_midgame.txt");
const MIDGAME_TARGET: &str = include_str!("fixtures/terran_midgame_target.txt");
const MIDGAME_ACTIONS: &str = include_str!("fixtures/terran_midgame_actions.txt");

#[test]
fn fixture_parses_to_expected_fields() {
    let obs = parse_observation(MIDGAME).unwrap();
    assert_eq!(obs.time_s, 5 * 60 + 44);
    assert_eq!(obs.race, Race::Terran);
    assert_eq!(obs.enemy_race, Race::Terran);
    assert_eq!(obs.map_name, "Flat64");
    assert_eq!(obs.map_size, DEFAULT_MAP_SIZE);
    assert_eq!(obs.minerals, 280);
    assert_eq!(obs.minerals_rate, 2575);
    assert_eq!(obs.gas, 124);
    assert_eq!(obs.gas_rate, 223);
    assert_eq!(obs.supply_used, 64);
    assert_eq!(obs.supply_cap, 93);
    assert_eq!(obs.supply_army, 16);
    assert_eq!(obs.supply_workers, 48);
    assert!(obs.alerts.is_empty());
    assert!(obs.upgrades.contains("Punishergrenades"));
    assert_eq!(obs.queue.len(), 9);
    assert_eq!(obs.queue.iter().filter(|q| q.is_construction).count(), 3);
    assert_eq!(obs.workers.mining.len(), 38);
    assert_eq!(obs.workers.mule.len(), 2);
    let army = obs
        .my_units
        .iter()
        .filter(|e| !is_worker_kind(&e.kind))
        .count();
    assert_eq!(army, 10);
    assert_eq!(obs.my_units.len(), 16);
    assert_eq!(obs.my_structures.len(), 24);
    assert_eq!(obs.enemy_units.len(), 3);
    assert_eq!(obs.enemy_structures.len(), 2);
    assert_eq!(obs.snapshot_enemy_structures.len(), 9);
    obs.validate().unwrap();
}

#[test]
fn fixture_round_trips_exactly() {
    for fixture in [MIDGAME, MIDGAME_TARGET] {
        let obs = parse_observation(fixture).unwrap();
        assert_eq!(serialize_observation(&obs), fixture);
    }
}

#[test]
fn target_fixture_parses() {
    let obs = parse_observation(MIDGAME_TARGET).unwrap();
    assert_eq!(obs.time_s, 5 * 60 + 49);
    assert_eq!(obs.minerals, 230);
    assert_eq!(obs.supply_used, 68);
    assert_eq!(obs.workers.mining.len(), 40);
    obs.validate().unwrap();
}

#[test]
fn action_fixture_round_trips() {
    let actions = parse_actions(MIDGAME_ACTIONS).unwrap();
    assert_eq!(actions.len(), 141);
    let rendered: String = actions
        .iter()
        .map(|a| serialize_action(a) + "\n")
        .collect();
    assert_eq!(rendered, MIDGAME_ACTIONS);

    assert_eq!(actions[0].t_offset_ds, 1);
    assert_eq!(actions[0].subject_kind, "Marauder");
    assert_eq!(actions[0].subject_id, 347);
    assert_eq!(actions[0].command, "Attack");
    assert_eq!(actions[0].target, Target::Point(31, 34));

    let smart = actions
        .iter()
        .find(|a| a.subject_id == 196 && a.command == "Smartcmd")
        .unwrap();
    assert_eq!(
        smart.target,
        Target::Entity {
            kind: "Orbitalcommand".to_string(),
            id: 83
        }
    );

    let train = actions.iter().find(|a| a.subject_id == 190).unwrap();
    assert_eq!(train.command, "Factorytrain_siegetank");
    assert_eq!(train.target, Target::None);
}

#[test]
fn generated_observations_round_trip() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for i in 0..1000 {
        let obs = random_observation(&mut rng);
        assert!(units_in_canonical_order(&obs));
        let text = serialize_observation(&obs);
        let back = parse_observation(&text)
            .unwrap_or_else(|e| panic!("iteration {i}: {e}\n---\n{text}"));
        assert_eq!(back, obs, "iteration {i}");
        assert_eq!(serialize_observation(&back), text);
    }
}

#[test]
fn generated_actions_round_trip() {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..500 {
        let actions = random_actions(&mut rng, 50);
        let text: String = actions
            .iter()
            .map(|a| serialize_action(a) + "\n")
            .collect();
        assert_eq!(parse_actions(&text).unwrap(), actions);
    }
}

#[test]
fn empty_sections_parse_and_round_trip() {
    let text = "[Info]\n\
                Time: 00:00 | Race: Terran | Enemy Race: Unknown | Map: Flat64\n\
                Minerals: 0 (+0/min) | Gas: 0 (+0/min)\n\
                Supply: 0/0 (Army: 0, Workers: 0)\n\
                Alerts: None\n\
                Upgrades: None\n\n\
                [Queue]\n[Empty]\n\n\
                [My Units]\n[Empty]\n\n\
                [My Structures]\n[Empty]\n\n\
                [Visible Hostiles]\n[Empty]\n\n";
    let obs = parse_observation(text).unwrap();
    assert_eq!(obs.minerals, 0);
    assert!(obs.queue.is_empty());
    assert!(obs.my_units.is_empty());
    assert!(obs.enemy_units.is_empty());
    assert_eq!(serialize_observation(&obs), text);
}

#[test]
fn missing_section_header_is_malformed_section() {
    let text = MIDGAME.replace("[Queue]\n", "");
    match parse_observation(&text) {
        Err(ParseError::MalformedSection { detail, .. }) => {
            assert!(detail.contains("[Queue]"), "{detail}");
        }
        other => panic!("expected MalformedSection, got {other:?}"),
    }
}

#[test]
fn unknown_line_is_malformed_with_location() {
    let text = MIDGAME.replace(
        " - Scv [2] at (53,72) (HP:100%)",
        "garbage that matches nothing",
    );
    match parse_observation(&text) {
        Err(ParseError::MalformedLine { line, section, content }) => {
            assert_eq!(section, "[My Units]");
            assert_eq!(content, "garbage that matches nothing");
            assert!(line > 0);
        }
        other => panic!("expected MalformedLine, got {other:?}"),
    }
}

#[test]
fn explicit_map_size_bounds_are_enforced() {
    let text = "[Info]\n\
                Time: 00:10 | Race: Terran | Enemy Race: Zerg | Map: Tiny (8x8)\n\
                Minerals: 50 (+0/min) | Gas: 0 (+0/min)\n\
                Supply: 0/0 (Army: 0, Workers: 0)\n\
                Alerts: None\n\
                Upgrades: None\n\n\
                [Queue]\n[Empty]\n\n\
                [My Units]\n - Marine [1] at (9,3) (HP:100%)\n\n\
                [My Structures]\n[Empty]\n\n\
                [Visible Hostiles]\n[Empty]\n\n";
    match parse_observation(text) {
        Err(ParseError::OutOfBounds { x, y, width, height, .. }) => {
            assert_eq!((x, y), (9, 3));
            assert_eq!((width, height), (8, 8));
        }
        other => panic!("expected OutOfBounds, got {other:?}"),
    }
}

#[test]
fn unknown_race_is_preserved() {
    let text = MIDGAME.replace("Enemy Race: Terran", "Enemy Race: Xelnaga");
    let obs = parse_observation(&text).unwrap();
    assert_eq!(obs.enemy_race, Race::Other("Xelnaga".to_string()));
    assert_eq!(serialize_observation(&obs), text);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Arbitrary junk never panics: it parses or yields one structured error.
    #[test]
    fn parser_is_total(input in "\\PC*") {
        let _ = parse_observation(&input);
        let _ = parse_actions(&input);
    }

    #[test]
    fn action_offsets_preserved_in_order(offsets in proptest::collection::vec(0u32..200, 0..20)) {
        let text: String = offsets
            .iter()
            .map(|t| format!("- +{}.{}s: Marine [7] - Move - (1, 2)\n", t / 10, t % 10))
            .collect();
        let parsed = parse_actions(&text).unwrap();
        let got: Vec<u32> = parsed.iter().map(|a| a.t_offset_ds).collect();
        prop_assert_eq!(got, offsets);
    }
}
