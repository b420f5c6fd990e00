use std::fs;
use std::time::Duration;

use sc2wm_obs::{parse_actions, parse_observation, serialize_observation, Observation};
use sc2wm_predict::testing::{chat_reply, StubServer};
use sc2wm_predict::{
    predict_corpus, strip_think_block, PredictError, PredictionRequest, Predictor, RemoteConfig,
    RemotePredictor, RuleSimPredictor, StaticBias,
};
use sc2wm_sim::{scenarios, simulate, SimConfig};

fn fixture(name: &str) -> String {
    let path = format!(
        "{}/../sc2wm-obs/tests/fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    );
    fs::read_to_string(path).unwrap()
}

fn fixture_request() -> PredictionRequest {
    PredictionRequest {
        start_obs: parse_observation(&fixture("terran_midgame.txt")).unwrap(),
        actions: parse_actions(&fixture("terran_midgame_actions.txt")).unwrap(),
        horizon_s: 5,
        player_id: 1,
    }
}

// ---------------------------------------------------------------------------
// Local predictors

#[test]
fn static_bias_advances_only_the_clock() {
    let req = fixture_request();
    let predicted = StaticBias::default().predict(&req).unwrap();
    let mut expected = req.start_obs.clone();
    expected.time_s += 5;
    assert_eq!(predicted, expected);

    let copied = StaticBias { strict_copy: true }.predict(&req).unwrap();
    assert_eq!(copied, req.start_obs);
    assert_eq!(StaticBias::default().name(), "static-bias");
}

#[test]
fn rule_sim_predictor_matches_direct_simulation() {
    let cfg = SimConfig::default();
    for scenario in scenarios::standard_batch(11).iter().take(4) {
        let req = PredictionRequest {
            start_obs: scenario.initial.clone(),
            actions: scenario.actions.clone(),
            horizon_s: 5,
            player_id: scenario.player_id,
        };
        let predicted = RuleSimPredictor { cfg: cfg.clone() }.predict(&req).unwrap();
        let direct = simulate(&scenario.initial, &scenario.actions, 5, &cfg).unwrap();
        assert_eq!(predicted, direct, "scenario {}", scenario.name);
    }
}

#[test]
fn zero_horizon_is_rejected_by_every_backend() {
    let mut req = fixture_request();
    req.horizon_s = 0;
    for predictor in [&StaticBias::default() as &dyn Predictor, &RuleSimPredictor::default()] {
        assert!(matches!(
            predictor.predict(&req),
            Err(PredictError::InvalidRequest(_))
        ));
    }
}

#[test]
fn think_blocks_are_stripped_before_parsing() {
    assert_eq!(strip_think_block("<think>\n\n</think>[Info]\nx"), "[Info]\nx");
    assert_eq!(strip_think_block("<think>plan: scout</think>\n[Info]"), "[Info]");
    assert_eq!(strip_think_block("  \n<think></think>body"), "body");
    assert_eq!(strip_think_block("[Info]\nno block"), "[Info]\nno block");
    assert_eq!(strip_think_block("<think>never closed"), "<think>never closed");
}

fn remote_cfg(server: &StubServer) -> RemoteConfig {
    RemoteConfig {
        endpoint: server.endpoint.clone(),
        timeout_s: 10.0,
        ..RemoteConfig::default()
    }
}

// ---------------------------------------------------------------------------
// Remote predictor

#[test]
fn remote_reply_with_think_block_round_trips() {
    let target_text = fixture("terran_midgame_target.txt");
    let reply = chat_reply(&format!("<think>\n\n</think>{target_text}"));
    let server = StubServer::spawn(Duration::ZERO, Box::new(move |_, _| (200, reply.clone())));
    let predictor = RemotePredictor::new(remote_cfg(&server)).unwrap();

    let predicted = predictor.predict(&fixture_request()).unwrap();
    assert_eq!(predicted, parse_observation(&target_text).unwrap());
    assert_eq!(server.hits(), 1);
    assert_eq!(predictor.name(), "remote");
}

#[test]
fn request_body_embeds_the_rendered_prompt_byte_for_byte() {
    let target_text = fixture("terran_midgame_target.txt");
    let reply = chat_reply(&target_text);
    let server = StubServer::spawn(Duration::ZERO, Box::new(move |_, _| (200, reply.clone())));
    let predictor = RemotePredictor::new(remote_cfg(&server)).unwrap();
    predictor.predict(&fixture_request()).unwrap();

    let golden_user = fs::read_to_string(format!(
        "{}/../sc2wm-dataset/tests/golden/world_model_user.txt",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap();
    let bodies = server.bodies();
    let body: serde_json::Value = serde_json::from_str(&bodies[0]).unwrap();
    assert_eq!(body["model"], "sc2wm");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"].as_str().unwrap(), golden_user);
}

#[test]
fn malformed_replies_are_retried_until_a_parseable_one() {
    let target_text = fixture("terran_midgame_target.txt");
    let server = StubServer::spawn(
        Duration::ZERO,
        Box::new(move |index, _| {
            if index < 2 {
                (200, chat_reply("scv good to go sir"))
            } else {
                (200, chat_reply(&target_text))
            }
        }),
    );
    let cfg = RemoteConfig { max_retries: 2, ..remote_cfg(&server) };
    let predicted = RemotePredictor::new(cfg).unwrap().predict(&fixture_request()).unwrap();
    assert_eq!(predicted.time_s, 349);
    assert_eq!(server.hits(), 3);
}

#[test]
fn exhausted_retries_surface_the_raw_reply() {
    let server = StubServer::spawn(
        Duration::ZERO,
        Box::new(|_, _| (200, chat_reply("scv good to go sir"))),
    );
    let cfg = RemoteConfig { max_retries: 1, ..remote_cfg(&server) };
    let err = RemotePredictor::new(cfg).unwrap().predict(&fixture_request()).unwrap_err();
    match err {
        PredictError::UnparseableReply { attempts, raw, .. } => {
            assert_eq!(attempts, 2);
            assert!(raw.contains("scv good to go sir"));
        }
        other => panic!("expected UnparseableReply, got {other:?}"),
    }
    assert_eq!(server.hits(), 2);
}

#[test]
fn persistent_server_errors_report_the_status() {
    let server = StubServer::spawn(Duration::ZERO, Box::new(|_, _| (500, "{}".to_string())));
    let cfg = RemoteConfig { max_retries: 2, ..remote_cfg(&server) };
    let err = RemotePredictor::new(cfg).unwrap().predict(&fixture_request()).unwrap_err();
    assert!(matches!(err, PredictError::HttpError { status: 500, attempts: 3 }));
    assert_eq!(server.hits(), 3);
}

#[test]
fn slow_endpoint_times_out_after_retries() {
    let reply = chat_reply("too late");
    let server = StubServer::spawn(
        Duration::from_millis(1500),
        Box::new(move |_, _| (200, reply.clone())),
    );
    let cfg = RemoteConfig { timeout_s: 0.25, max_retries: 1, ..remote_cfg(&server) };
    let err = RemotePredictor::new(cfg).unwrap().predict(&fixture_request()).unwrap_err();
    assert!(matches!(err, PredictError::Timeout { attempts: 2 }));
    assert_eq!(server.hits(), 2);
}

#[test]
fn configured_but_missing_auth_variable_fails_before_sending() {
    let server = StubServer::spawn(Duration::ZERO, Box::new(|_, _| (200, chat_reply("unused"))));
    let cfg = RemoteConfig {
        auth_env: Some("SC2WM_PREDICT_TEST_TOKEN_MISSING".to_string()),
        ..remote_cfg(&server)
    };
    let err = RemotePredictor::new(cfg).unwrap().predict(&fixture_request()).unwrap_err();
    assert!(matches!(err, PredictError::InvalidRequest(_)));
    assert_eq!(server.hits(), 0);
}

#[test]
fn bearer_token_is_read_from_the_named_variable() {
    let target_text = fixture("terran_midgame_target.txt");
    let reply = chat_reply(&target_text);
    let server = StubServer::spawn(Duration::ZERO, Box::new(move |_, _| (200, reply.clone())));
    std::env::set_var("SC2WM_PREDICT_TEST_TOKEN", "sekrit-123");
    let cfg = RemoteConfig {
        auth_env: Some("SC2WM_PREDICT_TEST_TOKEN".to_string()),
        ..remote_cfg(&server)
    };
    RemotePredictor::new(cfg).unwrap().predict(&fixture_request()).unwrap();
    let heads = server.heads();
    assert!(heads[0].to_ascii_lowercase().contains("authorization: bearer sekrit-123"));
}

#[test]
fn invalid_remote_configs_are_rejected() {
    let base = RemoteConfig::default();
    for cfg in [
        RemoteConfig { endpoint: String::new(), ..base.clone() },
        RemoteConfig { timeout_s: 0.0, ..base.clone() },
        RemoteConfig { timeout_s: f64::NAN, ..base.clone() },
        RemoteConfig { max_in_flight: 0, ..base.clone() },
        RemoteConfig { temperature: -1.0, ..base },
    ] {
        assert!(matches!(
            RemotePredictor::new(cfg),
            Err(PredictError::InvalidRequest(_))
        ));
    }
}

// ---------------------------------------------------------------------------
// Corpus driver

/// Reads the start time back out of the prompt's `Time: MM:SS` line.
fn prompt_time_s(body: &str) -> u32 {
    let value: serde_json::Value = serde_json::from_str(body).unwrap();
    let content = value["messages"][0]["content"].as_str().unwrap();
    let clock = content.split("Time: ").nth(1).unwrap();
    let (mm, rest) = clock.split_once(':').unwrap();
    let ss = &rest[..2];
    mm.parse::<u32>().unwrap() * 60 + ss.parse::<u32>().unwrap()
}

#[test]
fn corpus_results_come_back_in_request_order_under_bounded_concurrency() {
    let server = StubServer::spawn(
        Duration::from_millis(10),
        Box::new(|_, body| {
            let t = prompt_time_s(body);
            let text = serialize_observation(&Observation::empty(t + 5));
            (200, chat_reply(&text))
        }),
    );
    let cfg = RemoteConfig { max_in_flight: 4, ..remote_cfg(&server) };
    let max_in_flight = cfg.max_in_flight;
    let predictor = RemotePredictor::new(cfg).unwrap();

    let requests: Vec<PredictionRequest> = (0..100)
        .map(|i| PredictionRequest {
            start_obs: Observation::empty(1000 + i),
            actions: Vec::new(),
            horizon_s: 5,
            player_id: 1,
        })
        .collect();
    let results = predict_corpus(&predictor, &requests, max_in_flight);

    assert_eq!(results.len(), 100);
    for (i, result) in results.iter().enumerate() {
        assert_eq!(result.as_ref().unwrap().time_s, 1005 + i as u32);
    }
    assert_eq!(server.hits(), 100);
    let peak = server.peak();
    assert!(peak <= max_in_flight, "peak concurrency {peak} exceeded {max_in_flight}");
    assert!(peak >= 2, "expected overlapping requests, saw peak {peak}");
}

#[test]
fn corpus_driver_works_with_any_predictor_and_keeps_failures_in_place() {
    let mut requests: Vec<PredictionRequest> = (0..7)
        .map(|i| PredictionRequest {
            start_obs: Observation::empty(10 * i),
            actions: Vec::new(),
            horizon_s: 5,
            player_id: 1,
        })
        .collect();
    requests[3].horizon_s = 0;

    let results = predict_corpus(&StaticBias::default(), &requests, 3);
    assert_eq!(results.len(), 7);
    for (i, result) in results.iter().enumerate() {
        if i == 3 {
            assert!(matches!(result, Err(PredictError::InvalidRequest(_))));
        } else {
            assert_eq!(result.as_ref().unwrap().time_s, 10 * i as u32 + 5);
        }
    }
}
