//! Uniform predictor contract `(o_t, a_(t, t+h], h) -> predicted o_(t+h)`
//! with three interchangeable backends: a static-bias copier, the rule
//! simulator, and a remote chat-completion endpoint. Evaluation code never
//! branches on which backend produced a prediction.

mod remote;
mod request;
pub mod testing;

use sc2wm_obs::Observation;
use sc2wm_sim::{simulate, SimConfig};

pub use remote::{predict_corpus, RemoteConfig, RemotePredictor};
pub use request::{strip_think_block, PredictError, PredictionRequest};

pub trait Predictor: Sync {
    fn predict(&self, req: &PredictionRequest) -> Result<Observation, PredictError>;
    /// Stable backend name for logs and reports.
    fn name(&self) -> &'static str;
}

/// Baseline that returns the input observation as the prediction.
///
/// By default the clock still advances by the horizon so the copy stays a
/// plausible future observation; `strict_copy` disables even that.
#[derive(Debug, Clone, Default)]
pub struct StaticBias {
    pub strict_copy: bool,
}

impl Predictor for StaticBias {
    fn predict(&self, req: &PredictionRequest) -> Result<Observation, PredictError> {
        req.validate()?;
        let mut obs = req.start_obs.clone();
        if !self.strict_copy {
            obs.time_s += req.horizon_s;
        }
        Ok(obs)
    }

    fn name(&self) -> &'static str {
        "static-bias"
    }
}

/// The deterministic forward simulator behind the predictor contract.
#[derive(Debug, Clone, Default)]
pub struct RuleSimPredictor {
    pub cfg: SimConfig,
}

impl Predictor for RuleSimPredictor {
    fn predict(&self, req: &PredictionRequest) -> Result<Observation, PredictError> {
        req.validate()?;
        Ok(simulate(&req.start_obs, &req.actions, req.horizon_s, &self.cfg)?)
    }

    fn name(&self) -> &'static str {
        "rule-sim"
    }
}
