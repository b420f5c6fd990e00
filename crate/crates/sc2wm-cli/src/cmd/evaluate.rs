use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use sc2wm_dataset::DynamicsSample;
use sc2wm_eval::{
    aggregate, evaluate_sample, write_report_csv, write_report_json, write_time_series_csv,
};
use sc2wm_obs::{parse_observation, Observation};

use crate::cmd::predict::PredLine;
use crate::config::RunConfig;
use crate::error::{data, usage, CliError};

#[derive(Args)]
pub struct EvaluateArgs {
    /// Predictions file: `predict` output or a windows corpus.
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Ground-truth file: a windows corpus or `predict` output.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Output directory for report.json, report.csv, time_series.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallelism bound for per-sample scoring.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

type Key = (String, u32, u32);

/// Reads either wire form into keyed observations: `predict` output lines
/// carry `obs_text`, window samples carry `target_obs`.
fn read_side(path: &Path) -> Result<Vec<(Key, Observation)>, CliError> {
    let file = File::open(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let at = |line: usize, detail: String| data(format!("{} line {line}: {detail}", path.display()));
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let text = line.map_err(|e| at(line_no, e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| at(line_no, e.to_string()))?;
        if value.get("obs_text").is_some() {
            let pred: PredLine =
                serde_json::from_value(value).map_err(|e| at(line_no, e.to_string()))?;
            let obs =
                parse_observation(&pred.obs_text).map_err(|e| at(line_no, e.to_string()))?;
            out.push(((pred.trajectory_id, pred.t_start_s, pred.horizon_s), obs));
        } else if value.get("target_obs").is_some() {
            let sample =
                DynamicsSample::from_json(&text).map_err(|e| at(line_no, e.to_string()))?;
            let key = (sample.trajectory_id, sample.t_start_s, sample.horizon_s);
            out.push((key, sample.target_obs));
        } else {
            return Err(at(
                line_no,
                "record is neither a prediction (obs_text) nor a window (target_obs)".to_string(),
            ));
        }
    }
    Ok(out)
}

pub fn run(args: EvaluateArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    let pred_path = args.pred.ok_or_else(|| usage("--pred is required"))?;
    let truth_path = args.truth.ok_or_else(|| usage("--truth is required"))?;

    let preds = read_side(&pred_path)?;
    let truths = read_side(&truth_path)?;
    let mut by_key: BTreeMap<Key, Observation> = BTreeMap::new();
    for (key, obs) in preds {
        if by_key.insert(key.clone(), obs).is_some() {
            return Err(data(format!(
                "{}: duplicate prediction for {} t={} h={}",
                pred_path.display(),
                key.0,
                key.1,
                key.2
            )));
        }
    }
    let mut pairs = Vec::with_capacity(truths.len());
    for (key, truth) in &truths {
        let pred = by_key.remove(key).ok_or_else(|| {
            data(format!(
                "{}: no prediction for {} t={} h={}",
                pred_path.display(),
                key.0,
                key.1,
                key.2
            ))
        })?;
        pairs.push((pred, truth));
    }
    if let Some((key, _)) = by_key.into_iter().next() {
        return Err(data(format!(
            "{}: prediction for {} t={} h={} has no ground-truth record",
            pred_path.display(),
            key.0,
            key.1,
            key.2
        )));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.effective_workers())
        .build()
        .map_err(|e| data(format!("building worker pool: {e}")))?;
    let evals: Vec<_> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(pred, truth)| evaluate_sample(pred, truth, &cfg.eval))
            .collect()
    });
    let report = aggregate(&evals, &cfg.eval).map_err(|e| data(e.to_string()))?;

    println!(
        "{} samples: self AWD {:.4}, enemy AWD {:.4}",
        report.samples, report.self_awd, report.enemy_awd
    );
    for row in &report.rows {
        match row.value {
            Some(v) => println!("  [{}] {}: {:.4}", row.classification, row.metric, v),
            None => println!("  [{}] {}: undefined", row.classification, row.metric),
        }
    }

    if let Some(out) = args.out.or(cfg.output.clone()) {
        cfg.output = Some(out.clone());
        fs::create_dir_all(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
        let json_path = out.join("report.json");
        let json = File::create(&json_path)
            .map_err(|e| data(format!("{}: {e}", json_path.display())))?;
        write_report_json(&report, BufWriter::new(json))
            .map_err(|e| data(format!("{}: {e}", json_path.display())))?;
        let csv_path = out.join("report.csv");
        let csv =
            File::create(&csv_path).map_err(|e| data(format!("{}: {e}", csv_path.display())))?;
        write_report_csv(&report, BufWriter::new(csv))
            .map_err(|e| data(format!("{}: {e}", csv_path.display())))?;
        let series_path = out.join("time_series.csv");
        let series = File::create(&series_path)
            .map_err(|e| data(format!("{}: {e}", series_path.display())))?;
        write_time_series_csv(&report, BufWriter::new(series))
            .map_err(|e| data(format!("{}: {e}", series_path.display())))?;
        cfg.persist("evaluate", &out, true)?;
        println!("report written to {}", out.display());
    }
    Ok(())
}
