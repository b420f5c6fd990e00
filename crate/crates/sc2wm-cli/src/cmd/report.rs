use std::fs;
use std::path::PathBuf;

use clap::{Args, Subcommand};

use sc2wm_agent::{read_match_logs, MatchLog};
use sc2wm_metrics::{compute_match_metrics, report_to_csv, report_to_json, COLUMNS};

use crate::config::RunConfig;
use crate::error::{data, usage, CliError};

#[derive(Subcommand)]
pub enum ReportCommand {
    /// Aggregate the six online metrics over a directory of match logs.
    Online(ReportOnlineArgs),
}

#[derive(Args)]
pub struct ReportOnlineArgs {
    /// Directory of match-log JSON Lines files.
    #[arg(long)]
    logs: Option<PathBuf>,
    /// Output directory for online_metrics.json and online_metrics.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: ReportOnlineArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    let logs_dir = args
        .logs
        .or(cfg.input.clone())
        .ok_or_else(|| usage("--logs is required"))?;

    let mut paths: Vec<PathBuf> = fs::read_dir(&logs_dir)
        .map_err(|e| data(format!("{}: {e}", logs_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    paths.sort();
    let mut logs: Vec<MatchLog> = Vec::new();
    for path in &paths {
        logs.extend(read_match_logs(path).map_err(|e| data(e.to_string()))?);
    }
    if logs.is_empty() {
        return Err(data(format!("no match logs found in {}", logs_dir.display())));
    }

    let report = compute_match_metrics(&logs).map_err(|e| data(e.to_string()))?;
    println!("{} match logs from {}", logs.len(), logs_dir.display());
    for (column, summary) in COLUMNS.iter().zip(report.summaries()) {
        match summary {
            Some(s) => println!("  {column}: {:.2} +- {:.2} (n={})", s.mean, s.std, s.n),
            None => println!("  {column}: undefined for every log"),
        }
    }

    if let Some(out) = args.out.or(cfg.output.clone()) {
        cfg.input = Some(logs_dir);
        cfg.output = Some(out.clone());
        fs::create_dir_all(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
        let json_path = out.join("online_metrics.json");
        fs::write(&json_path, report_to_json(&report))
            .map_err(|e| data(format!("{}: {e}", json_path.display())))?;
        let csv_path = out.join("online_metrics.csv");
        fs::write(&csv_path, report_to_csv(&report))
            .map_err(|e| data(format!("{}: {e}", csv_path.display())))?;
        cfg.persist("report-online", &out, true)?;
        println!("metrics written to {}", out.display());
    }
    Ok(())
}
