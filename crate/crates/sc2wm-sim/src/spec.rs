use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

/// Static properties of one unit or structure kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSpec {
    pub kind: String,
    pub mineral_cost: u32,
    pub gas_cost: u32,
    pub supply_cost: u32,
    pub supply_provided: u32,
    /// Nominal build time in normal-speed seconds; divide by the game speed
    /// for the effective wall-clock time.
    pub build_time_s: u32,
    /// Movement speed in map units per second; 0 for structures.
    pub speed: f64,
    /// Damage per second against a single target.
    pub dps: f64,
    pub max_hp: u32,
    /// Vision radius in map units.
    pub sight: f64,
    pub is_structure: bool,
}

#[derive(Debug, Deserialize)]
struct UnitTableFile {
    version: String,
    #[serde(default)]
    #[allow(dead_code)]
    notes: String,
    units: Vec<UnitSpec>,
}

/// The unit data table, keyed by canonical kind name.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTable {
    pub version: String,
    units: BTreeMap<String, UnitSpec>,
}

impl UnitTable {
    /// The table bundled with the crate.
    pub fn bundled() -> UnitTable {
        Self::from_json(include_str!("../data/units.json").as_bytes())
            .expect("bundled unit table parses")
    }

    /// Loads a table from JSON: `{"version": ..., "units": [UnitSpec...]}`.
    pub fn from_json(reader: impl Read) -> Result<UnitTable, String> {
        let file: UnitTableFile =
            serde_json::from_reader(reader).map_err(|e| format!("unit table: {e}"))?;
        let mut units = BTreeMap::new();
        for spec in file.units {
            if spec.speed < 0.0 || spec.dps < 0.0 || spec.sight < 0.0 {
                return Err(format!("unit {}: negative rate", spec.kind));
            }
            if units.insert(spec.kind.clone(), spec).is_some() {
                return Err("duplicate unit kind in table".to_string());
            }
        }
        Ok(UnitTable { version: file.version, units })
    }

    /// Looks a kind up by its canonical name.
    pub fn get(&self, kind: &str) -> Option<&UnitSpec> {
        self.units.get(kind)
    }

    /// Case-insensitive lookup, for product names inside command strings
    /// (`Factorytrain_siegetank` carries `siegetank`).
    pub fn get_ci(&self, kind: &str) -> Option<&UnitSpec> {
        self.units
            .values()
            .find(|spec| spec.kind.eq_ignore_ascii_case(kind))
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.units.keys().map(String::as_str)
    }
}

/// Simulator parameters.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Game speed multiplier; effective build time = nominal / speed.
    pub game_speed: f64,
    /// Engagement range: combat applies between entities within this
    /// distance, in map units.
    pub combat_radius: f64,
    /// Minerals per minute contributed by one mining worker; drives income
    /// rate updates when the mining roster changes.
    pub income_per_worker: f64,
    pub units: UnitTable,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            game_speed: 1.4,
            combat_radius: 7.0,
            income_per_worker: 60.0,
            units: UnitTable::bundled(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.game_speed > 0.0) {
            return Err(format!("game_speed must be > 0, got {}", self.game_speed));
        }
        if !(self.combat_radius > 0.0) {
            return Err(format!("combat_radius must be > 0, got {}", self.combat_radius));
        }
        if self.income_per_worker < 0.0 {
            return Err(format!("income_per_worker must be >= 0, got {}", self.income_per_worker));
        }
        Ok(())
    }

    /// Effective build seconds for a nominal table entry.
    pub fn effective_build_time(&self, nominal_s: u32) -> f64 {
        nominal_s as f64 / self.game_speed
    }

    /// Integer queue progress gained per simulated second:
    /// `round(100 * game_speed / nominal)`, never less than 1 so every task
    /// eventually finishes.
    pub fn progress_per_second(&self, nominal_s: u32) -> u32 {
        if nominal_s == 0 {
            return 100;
        }
        let raw = 100.0 * self.game_speed / nominal_s as f64;
        (raw.round() as u32).max(1)
    }
}
