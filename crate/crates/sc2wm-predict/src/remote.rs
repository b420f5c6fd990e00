//! Chat-completion client for LLM-backed prediction, plus a bounded
//! parallel driver usable with any predictor.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use sc2wm_dataset::{render_world_model_prompt, DynamicsSample, RenderConfig};
use sc2wm_obs::{parse_observation, Observation};

use crate::request::{strip_think_block, PredictError, PredictionRequest};
use crate::Predictor;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    /// Full chat-completion URL, e.g. `http://host:8000/v1/chat/completions`.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token; `None`
    /// sends unauthenticated requests. The variable is read per call, never
    /// stored.
    pub auth_env: Option<String>,
    pub timeout_s: f64,
    /// Additional attempts after the first failure.
    pub max_retries: u32,
    pub max_in_flight: usize,
    pub temperature: f64,
    /// Render prompts with the `/no_think` suffix, matching the training
    /// data.
    pub no_think: bool,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: "http://127.0.0.1:8000/v1/chat/completions".to_string(),
            model: "sc2wm".to_string(),
            auth_env: None,
            timeout_s: 30.0,
            max_retries: 2,
            max_in_flight: 4,
            temperature: 0.0,
            no_think: true,
        }
    }
}

impl RemoteConfig {
    pub fn validate(&self) -> Result<(), PredictError> {
        let bad = |detail: String| Err(PredictError::InvalidRequest(detail));
        if self.endpoint.is_empty() {
            return bad("remote endpoint must not be empty".to_string());
        }
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return bad(format!("remote timeout must be positive, got {}", self.timeout_s));
        }
        if self.max_in_flight == 0 {
            return bad("remote max_in_flight must be >= 1".to_string());
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("remote temperature must be >= 0, got {}", self.temperature));
        }
        Ok(())
    }
}

/// Predictor backed by a chat-completion endpoint.
///
/// Each call renders the dynamics prompt for the request, sends it as a
/// single user message, strips a leading think block from the reply, and
/// parses the remainder as an observation. Failures are retried up to
/// `max_retries` times; the returned error reflects the last attempt.
pub struct RemotePredictor {
    cfg: RemoteConfig,
    client: reqwest::blocking::Client,
}

impl RemotePredictor {
    pub fn new(cfg: RemoteConfig) -> Result<RemotePredictor, PredictError> {
        cfg.validate()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(cfg.timeout_s))
            .build()
            .map_err(|e| PredictError::InvalidRequest(format!("http client: {e}")))?;
        Ok(RemotePredictor { cfg, client })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.cfg
    }

    /// The exact user-message text sent for `req`.
    pub fn user_prompt(&self, req: &PredictionRequest) -> String {
        let mut placeholder_target = req.start_obs.clone();
        placeholder_target.time_s += req.horizon_s;
        let sample = DynamicsSample {
            trajectory_id: String::new(),
            t_start_s: req.start_obs.time_s,
            horizon_s: req.horizon_s,
            start_obs: req.start_obs.clone(),
            actions: req.actions.clone(),
            target_obs: placeholder_target,
        };
        let render = RenderConfig { no_think: self.cfg.no_think };
        let (user, _assistant) = render_world_model_prompt(&sample, req.player_id, &render);
        user
    }

    fn attempt(&self, body: &serde_json::Value, token: Option<&str>) -> Result<Observation, Failure> {
        let mut builder = self.client.post(&self.cfg.endpoint).json(body);
        if let Some(token) = token {
            builder = builder.bearer_auth(token);
        }
        let resp = builder.send().map_err(|e| {
            if e.is_timeout() {
                Failure::Timeout
            } else {
                Failure::Transport(e.to_string())
            }
        })?;
        let status = resp.status();
        let text = resp.text().map_err(|e| {
            if e.is_timeout() {
                Failure::Timeout
            } else {
                Failure::Transport(e.to_string())
            }
        })?;
        if !status.is_success() {
            return Err(Failure::Http(status.as_u16()));
        }
        let reply: ChatReply = serde_json::from_str(&text).map_err(|e| Failure::Unparseable {
            detail: format!("reply is not chat-completion JSON: {e}"),
            raw: text.clone(),
        })?;
        let content = match reply.choices.first() {
            Some(choice) => &choice.message.content,
            None => {
                return Err(Failure::Unparseable {
                    detail: "reply has no choices".to_string(),
                    raw: text,
                })
            }
        };
        let obs_text = strip_think_block(content);
        parse_observation(obs_text).map_err(|e| Failure::Unparseable {
            detail: format!("reply does not parse as an observation: {e}"),
            raw: content.clone(),
        })
    }
}

impl Predictor for RemotePredictor {
    fn predict(&self, req: &PredictionRequest) -> Result<Observation, PredictError> {
        req.validate()?;
        let token = match &self.cfg.auth_env {
            Some(var) => match std::env::var(var) {
                Ok(token) => Some(token),
                Err(_) => {
                    return Err(PredictError::InvalidRequest(format!(
                        "auth environment variable {var} is not set"
                    )))
                }
            },
            None => None,
        };
        let body = serde_json::json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": self.user_prompt(req)}],
            "temperature": self.cfg.temperature,
        });
        let attempts = self.cfg.max_retries + 1;
        let mut last = Failure::Transport("no attempt made".to_string());
        for _ in 0..attempts {
            match self.attempt(&body, token.as_deref()) {
                Ok(obs) => return Ok(obs),
                Err(failure) => last = failure,
            }
        }
        Err(last.into_error(attempts))
    }

    fn name(&self) -> &'static str {
        "remote"
    }
}

enum Failure {
    Timeout,
    Transport(String),
    Http(u16),
    Unparseable { detail: String, raw: String },
}

impl Failure {
    fn into_error(self, attempts: u32) -> PredictError {
        match self {
            Failure::Timeout => PredictError::Timeout { attempts },
            Failure::Transport(detail) => PredictError::Transport { attempts, detail },
            Failure::Http(status) => PredictError::HttpError { status, attempts },
            Failure::Unparseable { detail, raw } => {
                PredictError::UnparseableReply { attempts, detail, raw }
            }
        }
    }
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReplyMessage,
}

#[derive(Deserialize)]
struct ChatReplyMessage {
    content: String,
}

/// Runs every request through `predictor` on up to `max_in_flight` worker
/// threads and returns results in request order, independent of completion
/// order.
pub fn predict_corpus<P: Predictor + ?Sized>(
    predictor: &P,
    requests: &[PredictionRequest],
    max_in_flight: usize,
) -> Vec<Result<Observation, PredictError>> {
    let workers = max_in_flight.max(1).min(requests.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Observation, PredictError>>>> =
        Mutex::new((0..requests.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= requests.len() {
                    break;
                }
                let result = predictor.predict(&requests[i]);
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });
    let filled = slots.into_inner().unwrap();
    filled.into_iter().map(|slot| slot.expect("worker filled every slot")).collect()
}
