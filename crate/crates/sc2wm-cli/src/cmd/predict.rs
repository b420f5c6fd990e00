use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use sc2wm_obs::jsonl::write_jsonl;
use sc2wm_obs::serialize_observation;
use sc2wm_predict::{
    predict_corpus, PredictionRequest, Predictor, RemotePredictor, RuleSimPredictor, StaticBias,
};

use crate::config::RunConfig;
use crate::error::{data, usage, CliError};

/// One prediction in the wire form consumed by `evaluate`.
#[derive(Serialize, Deserialize)]
pub struct PredLine {
    pub trajectory_id: String,
    pub t_start_s: u32,
    pub horizon_s: u32,
    pub backend: String,
    pub obs_text: String,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Predictor backend: static, rulesim, or remote.
    #[arg(long)]
    backend: Option<String>,
    /// Windows corpus to predict (JSON Lines).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output predictions file (JSON Lines).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Player id for request validation.
    #[arg(long)]
    player_id: Option<u32>,
    /// Parallelism bound; also caps remote in-flight requests.
    #[arg(long)]
    workers: Option<usize>,
    /// Unit data table for the rulesim backend.
    #[arg(long)]
    unit_table: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn build_predictor(backend: &str, cfg: &RunConfig) -> Result<Box<dyn Predictor>, CliError> {
    match backend {
        "static" => Ok(Box::new(StaticBias::default())),
        "rulesim" => Ok(Box::new(RuleSimPredictor { cfg: cfg.sim_config()? })),
        "remote" => Ok(Box::new(
            RemotePredictor::new(cfg.remote.clone()).map_err(|e| usage(e.to_string()))?,
        )),
        other => Err(usage(format!(
            "unknown backend {other:?}; expected static, rulesim, or remote"
        ))),
    }
}

pub fn run(args: PredictArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    if let Some(v) = args.backend {
        cfg.backend = Some(v);
    }
    if let Some(v) = args.input {
        cfg.input = Some(v);
    }
    if let Some(v) = args.out {
        cfg.output = Some(v);
    }
    if let Some(v) = args.player_id {
        cfg.player_id = v;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    if let Some(v) = args.unit_table {
        cfg.unit_table = Some(v);
    }
    let backend = cfg.backend.clone().ok_or_else(|| usage("--backend is required"))?;
    let input = cfg.input.clone().ok_or_else(|| usage("--in is required"))?;
    let out = cfg.output.clone().ok_or_else(|| usage("--out is required"))?;
    let predictor = build_predictor(&backend, &cfg)?;

    let file = File::open(&input).map_err(|e| data(format!("{}: {e}", input.display())))?;
    let windows =
        sc2wm_dataset::read_windows(file).map_err(|e| data(format!("{}: {e}", input.display())))?;
    let requests: Vec<PredictionRequest> = windows
        .iter()
        .map(|sample| PredictionRequest::from_sample(sample, cfg.player_id))
        .collect();

    let in_flight = if backend == "remote" {
        cfg.remote.max_in_flight.min(cfg.effective_workers())
    } else {
        cfg.effective_workers()
    };
    let results = predict_corpus(predictor.as_ref(), &requests, in_flight);

    let mut lines = Vec::with_capacity(results.len());
    for (i, result) in results.into_iter().enumerate() {
        let window = &windows[i];
        let obs = result.map_err(|e| {
            data(format!(
                "{} window {} ({} t={}): {e}",
                input.display(),
                i + 1,
                window.trajectory_id,
                window.t_start_s
            ))
        })?;
        lines.push(PredLine {
            trajectory_id: window.trajectory_id.clone(),
            t_start_s: window.t_start_s,
            horizon_s: window.horizon_s,
            backend: predictor.name().to_string(),
            obs_text: serialize_observation(&obs),
        });
    }
    let file = File::create(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
    write_jsonl(BufWriter::new(file), lines.iter())
        .map_err(|e| data(format!("{}: {e}", out.display())))?;
    cfg.persist("predict", &out, false)?;

    println!(
        "{} predictions via the {} backend -> {}",
        lines.len(),
        predictor.name(),
        out.display()
    );
    Ok(())
}
