use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;

use sc2wm_obs::jsonl::write_jsonl;
use sc2wm_sim::{generate_trajectory, scenarios, ScriptedScenario};

use crate::config::RunConfig;
use crate::error::{data, usage, CliError};

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario file: initial observation plus a script of timed actions.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Generate this many scenarios (at most 20) from the built-in
    /// families instead of reading a file.
    #[arg(long)]
    demo: Option<usize>,
    /// Trajectory length in game seconds.
    #[arg(long)]
    length: Option<u32>,
    /// Seed for demo scenario generation.
    #[arg(long)]
    seed: Option<u64>,
    /// Output trajectory corpus (JSON Lines).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Unit data table overriding the bundled one.
    #[arg(long)]
    unit_table: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: SimulateArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    if let Some(v) = args.length {
        cfg.length_s = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.out {
        cfg.output = Some(v);
    }
    if let Some(v) = args.unit_table {
        cfg.unit_table = Some(v);
    }
    let out = cfg.output.clone().ok_or_else(|| usage("--out is required"))?;
    let sim_cfg = cfg.sim_config()?;

    let scenarios: Vec<ScriptedScenario> = match (&args.scenario, args.demo) {
        (Some(path), None) => {
            let file = File::open(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
            vec![ScriptedScenario::from_json(file)
                .map_err(|e| data(format!("{}: {e}", path.display())))?]
        }
        (None, Some(count)) => {
            if count == 0 || count > 20 {
                return Err(usage("--demo takes a count between 1 and 20"));
            }
            let mut batch = scenarios::standard_batch(cfg.seed);
            batch.truncate(count);
            batch
        }
        _ => return Err(usage("exactly one of --scenario or --demo is required")),
    };

    let mut records = Vec::new();
    for scenario in &scenarios {
        let trajectory = generate_trajectory(scenario, cfg.length_s, &sim_cfg)
            .map_err(|e| data(format!("scenario {}: {e}", scenario.name)))?;
        records.extend(trajectory);
    }
    let file = File::create(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
    write_jsonl(BufWriter::new(file), records.iter())
        .map_err(|e| data(format!("{}: {e}", out.display())))?;
    cfg.persist("simulate", &out, false)?;

    println!(
        "{} scenarios simulated for {} s each, {} records -> {}",
        scenarios.len(),
        cfg.length_s,
        records.len(),
        out.display()
    );
    Ok(())
}
