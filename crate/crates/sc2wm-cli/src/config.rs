use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use sc2wm_agent::AblationMode;
use sc2wm_eval::EvalConfig;
use sc2wm_predict::RemoteConfig;
use sc2wm_sim::{SimConfig, UnitTable};

use crate::error::{data, usage, CliError};

/// One declarative run configuration shared by every subcommand.
///
/// A config file (TOML or JSON, `--config`) sets any subset of these keys,
/// command-line flags override file values, and the merged result is
/// persisted next to the outputs so a run is reproducible from that file
/// alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Seed for every random choice a run makes (dataset splits, demo
    /// scenario generation).
    pub seed: u64,
    /// Parallelism bound; 0 means one worker per available core.
    pub workers: usize,
    pub ablation: String,
    /// Predictor backend: `static`, `rulesim`, or `remote`.
    pub backend: Option<String>,
    pub horizon_s: u32,
    pub step_s: u32,
    /// Train:valid:test split ratio, e.g. `8:1:1`.
    pub ratios: String,
    pub player_id: u32,
    /// Decision interval for agent episodes, in game seconds.
    pub cadence_s: u32,
    /// Simulated episode or scenario length, in game seconds.
    pub length_s: u32,
    /// Unit data table overriding the bundled one.
    pub unit_table: Option<PathBuf>,
    pub eval: EvalConfig,
    pub remote: RemoteConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            output: None,
            seed: 0,
            workers: 0,
            ablation: "full".to_string(),
            backend: None,
            horizon_s: 5,
            step_s: 1,
            ratios: "8:1:1".to_string(),
            player_id: 1,
            cadence_s: 5,
            length_s: 300,
            unit_table: None,
            eval: EvalConfig::default(),
            remote: RemoteConfig::default(),
        }
    }
}

impl RunConfig {
    /// Loads the config file when given, otherwise the defaults.
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        match path {
            Some(path) => read_config_file(path),
            None => Ok(RunConfig::default()),
        }
    }

    pub fn effective_workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            thread::available_parallelism().map_or(1, |n| n.get())
        }
    }

    pub fn ablation_mode(&self) -> Result<AblationMode, CliError> {
        self.ablation.parse().map_err(usage)
    }

    pub fn split_ratios(&self) -> Result<(u32, u32, u32), CliError> {
        let parts: Vec<&str> = self.ratios.split(':').collect();
        let parse = |s: &str| s.trim().parse::<u32>().ok();
        match parts.as_slice() {
            [a, b, c] => match (parse(a), parse(b), parse(c)) {
                (Some(a), Some(b), Some(c)) => Ok((a, b, c)),
                _ => Err(usage(format!("ratios {:?} must be three integers", self.ratios))),
            },
            _ => Err(usage(format!("ratios {:?} must look like 8:1:1", self.ratios))),
        }
    }

    /// Simulator parameters, with the unit table swapped in when a path is
    /// configured.
    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let mut cfg = SimConfig::default();
        if let Some(path) = &self.unit_table {
            let file = fs::File::open(path)
                .map_err(|e| data(format!("{}: {e}", path.display())))?;
            cfg.units = UnitTable::from_json(file)
                .map_err(|e| data(format!("{}: {e}", path.display())))?;
        }
        Ok(cfg)
    }

    /// Persists the merged config next to the outputs: `run_config.json`
    /// inside an output directory, or `<stem>.run.json` beside an output
    /// file.
    pub fn persist(&self, command: &str, output: &Path, output_is_dir: bool) -> Result<(), CliError> {
        let path = if output_is_dir {
            output.join("run_config.json")
        } else {
            output.with_extension("run.json")
        };
        let doc = json!({
            "command": command,
            "workers_effective": self.effective_workers(),
            "config": self,
        });
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| data(format!("encoding run config: {e}")))?;
        fs::write(&path, text + "\n").map_err(|e| data(format!("{}: {e}", path.display())))
    }
}

/// Reads a TOML or JSON file into any deserializable config type; the
/// format follows the extension. Malformed configuration is a usage error.
pub fn read_config_file<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        Some("json") => {
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        _ => Err(usage(format!(
            "{}: config files must end in .toml or .json",
            path.display()
        ))),
    }
}
