use std::collections::BTreeSet;
use std::fs;

use rand::rngs::StdRng;
use rand::SeedableRng;

use sc2wm_dataset::{
    build_dataset, build_windows, chat_record, has_residual_placeholder, read_trajectories,
    read_windows, render_world_model_prompt, split_trajectories, write_chat_records,
    write_windows, ChatRecord, DatasetError, DynamicsSample, RenderConfig,
};
use sc2wm_obs::{
    parse_actions, parse_observation, serialize_observation, testing, Observation,
    TrajectoryMeta, TrajectoryRecord,
};
use sc2wm_sim::{generate_trajectory, scenarios, simulate, SimConfig};

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

fn fixture_sample() -> DynamicsSample {
    let start_obs = parse_observation(&fixture("terran_midgame.txt")).unwrap();
    let target_obs = parse_observation(&fixture("terran_midgame_target.txt")).unwrap();
    let actions = parse_actions(&fixture("terran_midgame_actions.txt")).unwrap();
    DynamicsSample {
        trajectory_id: "terran-midgame".to_string(),
        t_start_s: start_obs.time_s,
        horizon_s: 5,
        start_obs,
        actions,
        target_obs,
    }
}

/// A minimal synthetic trajectory of `len + 1` records covering t=0..len.
fn flat_records(len: u32) -> Vec<TrajectoryRecord> {
    let meta = TrajectoryMeta {
        trajectory_id: "flat".to_string(),
        player_id: 1,
        map: "Flat64".to_string(),
        opponent_level: 1,
        result: "win".to_string(),
    };
    (0..=len)
        .map(|t| TrajectoryRecord {
            t_s: t,
            obs_text: serialize_observation(&Observation::empty(t)),
            actions: Vec::new(),
            meta: meta.clone(),
        })
        .collect()
}

#[test]
fn window_counts_match_the_formula() {
    assert_eq!(build_windows(&flat_records(10), 5, 1).unwrap().len(), 6);
    assert_eq!(build_windows(&flat_records(5), 5, 1).unwrap().len(), 1);
    assert_eq!(build_windows(&flat_records(4), 5, 1).unwrap().len(), 0);
    assert_eq!(build_windows(&flat_records(10), 5, 2).unwrap().len(), 3);
    assert_eq!(build_windows(&flat_records(9), 3, 3).unwrap().len(), 3);
    assert_eq!(build_windows(&[], 5, 1).unwrap().len(), 0);
}

#[test]
fn window_starts_step_and_targets_align() {
    let samples = build_windows(&flat_records(10), 5, 2).unwrap();
    let starts: Vec<u32> = samples.iter().map(|s| s.t_start_s).collect();
    assert_eq!(starts, vec![0, 2, 4]);
    for s in &samples {
        assert_eq!(s.target_obs.time_s, s.t_start_s + 5);
    }
}

#[test]
fn gaps_are_rejected_with_a_locator() {
    let mut records = flat_records(10);
    records.remove(4);
    match build_windows(&records, 5, 1) {
        Err(DatasetError::GapInTrajectory { trajectory_id, prev_t: 3, next_t: 5 }) => {
            assert_eq!(trajectory_id, "flat");
        }
        other => panic!("expected gap error, got {other:?}"),
    }
}

#[test]
fn windows_replay_exactly_under_the_simulator() {
    let cfg = SimConfig::default();
    for scenario in scenarios::standard_batch(21).iter().skip(1).take(3) {
        let records = generate_trajectory(scenario, 40, &cfg).unwrap();
        let samples = build_windows(&records, 5, 1).unwrap();
        assert_eq!(samples.len(), 36);
        for sample in &samples {
            let replayed = simulate(&sample.start_obs, &sample.actions, 5, &cfg).unwrap();
            assert_eq!(
                replayed, sample.target_obs,
                "{} window t={} diverged",
                scenario.name, sample.t_start_s
            );
        }
    }
}

#[test]
fn split_honors_largest_remainder_counts() {
    let hundred: Vec<String> = (0..100).map(|i| format!("traj-{i:03}")).collect();
    let split = split_trajectories(&hundred, (8, 1, 1), 7).unwrap();
    assert_eq!((split.train.len(), split.valid.len(), split.test.len()), (80, 10, 10));

    let ten: Vec<String> = (0..10).map(|i| format!("t{i}")).collect();
    let split = split_trajectories(&ten, (8, 1, 1), 7).unwrap();
    assert_eq!((split.train.len(), split.valid.len(), split.test.len()), (8, 1, 1));

    let one = vec!["only".to_string()];
    let split = split_trajectories(&one, (8, 1, 1), 7).unwrap();
    assert_eq!((split.train.len(), split.valid.len(), split.test.len()), (1, 0, 0));
}

#[test]
fn split_is_a_seed_stable_partition() {
    let ids: Vec<String> = (0..37).map(|i| format!("traj-{i}")).collect();
    let a = split_trajectories(&ids, (8, 1, 1), 99).unwrap();
    let b = split_trajectories(&ids, (8, 1, 1), 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());

    let all: BTreeSet<&String> = a.train.iter().chain(&a.valid).chain(&a.test).collect();
    assert_eq!(all.len(), ids.len());
    assert_eq!(a.train.len() + a.valid.len() + a.test.len(), ids.len());

    let other = split_trajectories(&ids, (8, 1, 1), 100).unwrap();
    assert_ne!(a, other, "different seeds give different partitions");
}

#[test]
fn rendered_prompt_matches_golden_bytes() {
    let sample = fixture_sample();
    let (user, assistant) = render_world_model_prompt(&sample, 1, &RenderConfig::default());
    assert_eq!(user, golden("world_model_user.txt"));
    assert_eq!(assistant, golden("world_model_assistant.txt"));

    let record = chat_record(&sample, 1, &RenderConfig::default());
    let line = serde_json::to_string(&record).unwrap();
    assert_eq!(format!("{line}\n"), golden("world_model_sample.jsonl"));
}

#[test]
fn no_think_flag_controls_both_sides() {
    let sample = fixture_sample();
    let cfg = RenderConfig { no_think: false };
    let (user, assistant) = render_world_model_prompt(&sample, 1, &cfg);
    assert!(!user.contains("/no_think"));
    assert!(user.ends_with("structure of the input observation.\n"));
    assert!(assistant.starts_with("[Info]\n"));
}

#[test]
fn empty_action_window_renders_explicit_marker() {
    let mut sample = fixture_sample();
    sample.actions.clear();
    let (user, _) = render_world_model_prompt(&sample, 1, &RenderConfig::default());
    assert!(user.contains("#### Action Sequence(5s):\n(none)\n"));
}

#[test]
fn no_placeholders_survive_rendering() {
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..50 {
        let start_obs = testing::random_observation(&mut rng);
        let mut target_obs = start_obs.clone();
        target_obs.time_s += 5;
        let sample = DynamicsSample {
            trajectory_id: "r".to_string(),
            t_start_s: start_obs.time_s,
            horizon_s: 5,
            start_obs,
            actions: testing::random_actions(&mut rng, 50),
            target_obs,
        };
        let (user, assistant) = render_world_model_prompt(&sample, 2, &RenderConfig::default());
        assert!(!has_residual_placeholder(&user));
        assert!(!has_residual_placeholder(&assistant));
        assert!(user.starts_with("### Role\n"));
    }
    assert!(has_residual_placeholder("leftover {delta} here"));
    assert!(!has_residual_placeholder("set {1, 2} and {X}"));
}

#[test]
fn windows_round_trip_through_jsonl() {
    let cfg = SimConfig::default();
    let scenario = &scenarios::standard_batch(4)[1];
    let records = generate_trajectory(scenario, 20, &cfg).unwrap();
    let samples = build_windows(&records, 5, 1).unwrap();

    let mut buf = Vec::new();
    write_windows(&mut buf, &samples).unwrap();
    let back = read_windows(buf.as_slice()).unwrap();
    assert_eq!(back, samples);
}

#[test]
fn chat_records_parse_back_line_by_line() {
    let sample = fixture_sample();
    let mut buf = Vec::new();
    write_chat_records(&mut buf, &[sample.clone(), sample], 1, &RenderConfig::default()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in lines {
        let record: ChatRecord = serde_json::from_str(line).unwrap();
        assert_eq!(record.messages.len(), 2);
        assert_eq!(record.messages[0].role, "user");
        assert_eq!(record.messages[1].role, "assistant");
    }
}

#[test]
fn build_dataset_groups_by_split_and_counts_windows() {
    let cfg = SimConfig::default();
    let trajectories: Vec<_> = scenarios::standard_batch(17)
        .iter()
        .take(10)
        .map(|s| generate_trajectory(s, 30, &cfg).unwrap())
        .collect();
    let built = build_dataset(&trajectories, 5, 1, (8, 1, 1), 123).unwrap();

    assert_eq!(built.manifest.counts["train"], built.train.len());
    assert_eq!(built.train.len() + built.valid.len() + built.test.len(), 10 * 26);
    assert_eq!(built.manifest.split.train.len(), 8);
    assert_eq!(built.manifest.split.valid.len(), 1);
    assert_eq!(built.manifest.split.test.len(), 1);
    assert_eq!(built.manifest.entries.len(), 260);

    // Every sample's trajectory must sit in the split the manifest claims.
    for entry in &built.manifest.entries {
        let sample = &built.split_samples(&entry.split)[entry.line - 1];
        assert_eq!(sample.trajectory_id, entry.trajectory_id);
        assert_eq!(sample.t_start_s, entry.t_start_s);
        assert_eq!(built.manifest.split.split_of(&entry.trajectory_id), Some(entry.split.as_str()));
    }

    let again = build_dataset(&trajectories, 5, 1, (8, 1, 1), 123).unwrap();
    assert_eq!(
        serde_json::to_string(&again.manifest).unwrap(),
        serde_json::to_string(&built.manifest).unwrap()
    );
}

#[test]
fn trajectory_jsonl_reader_groups_runs() {
    let cfg = SimConfig::default();
    let batch = scenarios::standard_batch(2);
    let mut buf = Vec::new();
    for scenario in batch.iter().take(3) {
        for record in generate_trajectory(scenario, 10, &cfg).unwrap() {
            let line = serde_json::to_string(&record).unwrap();
            buf.extend_from_slice(line.as_bytes());
            buf.push(b'\n');
        }
    }
    let groups = read_trajectories(buf.as_slice()).unwrap();
    assert_eq!(groups.len(), 3);
    assert!(groups.iter().all(|g| g.len() == 11));
}
