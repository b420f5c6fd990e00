use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use clap::Args;

use sc2wm_agent::read_match_logs;
use sc2wm_dataset::DynamicsSample;
use sc2wm_obs::jsonl::read_jsonl;
use sc2wm_obs::{parse_action_line, parse_observation, serialize_observation, TrajectoryRecord};

use crate::config::RunConfig;
use crate::error::{data, usage, CliError};

#[derive(Args)]
pub struct ParseArgs {
    /// Corpus file to validate.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Record kind: trajectories, windows, or logs.
    #[arg(long, default_value = "trajectories")]
    kind: String,
    /// Additionally require observation text to be byte-identical to its
    /// canonical re-serialization.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: ParseArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    if let Some(path) = args.input {
        cfg.input = Some(path);
    }
    let input = cfg.input.clone().ok_or_else(|| usage("--in is required"))?;
    let file = File::open(&input).map_err(|e| data(format!("{}: {e}", input.display())))?;
    let reader = BufReader::new(file);
    let at = |line: usize, detail: String| data(format!("{} line {line}: {detail}", input.display()));

    match args.kind.as_str() {
        "trajectories" => {
            let records: Vec<TrajectoryRecord> =
                read_jsonl(reader).map_err(|e| data(format!("{}: {e}", input.display())))?;
            let mut trajectories = 0usize;
            let mut prev_id: Option<&str> = None;
            for (i, record) in records.iter().enumerate() {
                let line = i + 1;
                let obs = parse_observation(&record.obs_text)
                    .map_err(|e| at(line, e.to_string()))?;
                if obs.time_s != record.t_s {
                    return Err(at(
                        line,
                        format!("t_s is {} but the observation clock reads {}", record.t_s, obs.time_s),
                    ));
                }
                if args.strict && serialize_observation(&obs) != record.obs_text {
                    return Err(at(line, "observation text is not canonical".to_string()));
                }
                for (j, action) in record.actions.iter().enumerate() {
                    parse_action_line(action, j + 1).map_err(|e| at(line, e.to_string()))?;
                }
                if prev_id != Some(record.meta.trajectory_id.as_str()) {
                    trajectories += 1;
                    prev_id = Some(record.meta.trajectory_id.as_str());
                }
            }
            println!(
                "{}: {} trajectory records across {} trajectories, all valid",
                input.display(),
                records.len(),
                trajectories
            );
        }
        "windows" => {
            let mut samples = 0usize;
            let file = File::open(&input).map_err(|e| data(format!("{}: {e}", input.display())))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line_no = i + 1;
                let text = line.map_err(|e| at(line_no, e.to_string()))?;
                if text.trim().is_empty() {
                    continue;
                }
                let sample =
                    DynamicsSample::from_json(&text).map_err(|e| at(line_no, e.to_string()))?;
                sample.validate().map_err(|e| at(line_no, e))?;
                samples += 1;
            }
            println!("{}: {} window samples, all valid", input.display(), samples);
        }
        "logs" => {
            let logs = read_match_logs(&input).map_err(|e| data(e.to_string()))?;
            let steps: usize = logs.iter().map(|l| l.steps.len()).sum();
            println!(
                "{}: {} match logs with {} decision steps, all valid",
                input.display(),
                logs.len(),
                steps
            );
        }
        other => {
            return Err(usage(format!(
                "unknown corpus kind {other:?}; expected trajectories, windows, or logs"
            )));
        }
    }
    Ok(())
}
