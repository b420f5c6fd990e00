use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;

use sc2wm_dataset::{build_dataset, read_trajectories, write_chat_records, write_windows, RenderConfig};

use crate::config::RunConfig;
use crate::error::{data, usage, CliError};

#[derive(Args)]
pub struct BuildDatasetArgs {
    /// Trajectory corpus (JSON Lines).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output directory for the split dataset and its manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Prediction horizon in game seconds.
    #[arg(long)]
    horizon: Option<u32>,
    /// Sliding-window step in game seconds.
    #[arg(long)]
    step: Option<u32>,
    /// Train:valid:test ratio, e.g. 8:1:1.
    #[arg(long)]
    ratios: Option<String>,
    /// Split seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Player id rendered into the prompts.
    #[arg(long)]
    player_id: Option<u32>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: BuildDatasetArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    if let Some(v) = args.input {
        cfg.input = Some(v);
    }
    if let Some(v) = args.out {
        cfg.output = Some(v);
    }
    if let Some(v) = args.horizon {
        cfg.horizon_s = v;
    }
    if let Some(v) = args.step {
        cfg.step_s = v;
    }
    if let Some(v) = args.ratios {
        cfg.ratios = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.player_id {
        cfg.player_id = v;
    }
    let input = cfg.input.clone().ok_or_else(|| usage("--in is required"))?;
    let out = cfg.output.clone().ok_or_else(|| usage("--out is required"))?;
    let ratios = cfg.split_ratios()?;

    let file = File::open(&input).map_err(|e| data(format!("{}: {e}", input.display())))?;
    let trajectories =
        read_trajectories(file).map_err(|e| data(format!("{}: {e}", input.display())))?;
    let built = build_dataset(&trajectories, cfg.horizon_s, cfg.step_s, ratios, cfg.seed)
        .map_err(|e| data(e.to_string()))?;

    fs::create_dir_all(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
    let render = RenderConfig::default();
    for split in ["train", "valid", "test"] {
        let samples = built.split_samples(split);
        let chat_path = out.join(format!("{split}.jsonl"));
        let chat = File::create(&chat_path)
            .map_err(|e| data(format!("{}: {e}", chat_path.display())))?;
        write_chat_records(BufWriter::new(chat), samples, cfg.player_id, &render)
            .map_err(|e| data(format!("{}: {e}", chat_path.display())))?;
        let windows_path = out.join(format!("{split}.windows.jsonl"));
        let windows = File::create(&windows_path)
            .map_err(|e| data(format!("{}: {e}", windows_path.display())))?;
        write_windows(BufWriter::new(windows), samples)
            .map_err(|e| data(format!("{}: {e}", windows_path.display())))?;
    }
    let manifest_path = out.join("manifest.json");
    let manifest = serde_json::to_string_pretty(&built.manifest)
        .map_err(|e| data(format!("encoding manifest: {e}")))?;
    fs::write(&manifest_path, manifest + "\n")
        .map_err(|e| data(format!("{}: {e}", manifest_path.display())))?;
    cfg.persist("build-dataset", &out, true)?;

    println!(
        "{} train / {} valid / {} test samples from {} trajectories -> {} (horizon {} s, step {} s, seed {})",
        built.train.len(),
        built.valid.len(),
        built.test.len(),
        trajectories.len(),
        out.display(),
        cfg.horizon_s,
        cfg.step_s,
        cfg.seed
    );
    Ok(())
}
