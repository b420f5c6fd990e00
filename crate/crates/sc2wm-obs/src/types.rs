use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Coordinate bounds assumed when the Info line carries no explicit size
/// (`Map: Flat64` instead of `Map: Flat64 (64x64)`). This is the engine's
/// maximum grid, so bounds checking is effectively disabled for such maps.
pub const DEFAULT_MAP_SIZE: (u32, u32) = (256, 256);

/// Engine-wide supply ceiling.
pub const SUPPLY_CAP_MAX: u32 = 200;

/// Player race as rendered in the Info line. Spellings outside the three
/// races and `Unknown` are preserved verbatim rather than rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Race {
    Terran,
    Protoss,
    Zerg,
    Unknown,
    Other(String),
}

impl Race {
    pub fn parse(s: &str) -> Race {
        match s {
            "Terran" => Race::Terran,
            "Protoss" => Race::Protoss,
            "Zerg" => Race::Zerg,
            "Unknown" => Race::Unknown,
            other => Race::Other(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Race::Terran => "Terran",
            Race::Protoss => "Protoss",
            Race::Zerg => "Zerg",
            Race::Unknown => "Unknown",
            Race::Other(s) => s,
        }
    }
}

impl fmt::Display for Race {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A visible unit or structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: u32,
    /// Unit-type name, e.g. `Marine`, `Barracks`. Charset `[A-Za-z0-9_]`.
    pub kind: String,
    pub pos: (i32, i32),
    /// Health percentage in 1..=100. Dead entities never appear.
    pub hp_pct: u32,
    /// Energy percentage, rendered only when present.
    pub energy_pct: Option<u32>,
    /// Free-form status, rendered only when present. May not contain `)`.
    pub status: Option<String>,
}

impl Entity {
    pub fn new(id: u32, kind: &str, pos: (i32, i32), hp_pct: u32) -> Entity {
        Entity {
            id,
            kind: kind.to_string(),
            pos,
            hp_pct,
            energy_pct: None,
            status: None,
        }
    }
}

/// Last-seen record of an enemy structure now hidden by the fog.
/// Snapshots carry no id and no health.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotEntity {
    pub kind: String,
    pub pos: (i32, i32),
}

/// One in-progress task in the `[Queue]` section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueEntry {
    /// Producing structure, or the building itself for constructions.
    pub owner_id: u32,
    pub owner_kind: String,
    pub pos: (i32, i32),
    pub task: String,
    /// Integer percent in 0..100 (a finished task leaves the queue).
    pub progress_pct: u32,
    /// Rendered with the `Constructing:` prefix; for constructions the task
    /// equals the owner kind.
    pub is_construction: bool,
}

/// The aggregated `> Workers:` line: ids of workers currently mining plus
/// active MULEs. Sets, so the rendered ascending order is canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerSummary {
    pub mining: BTreeSet<u32>,
    pub mule: BTreeSet<u32>,
}

impl WorkerSummary {
    pub fn is_empty(&self) -> bool {
        self.mining.is_empty() && self.mule.is_empty()
    }

    /// Workers counted for income purposes (MULEs mine like workers).
    pub fn mining_count(&self) -> usize {
        self.mining.len() + self.mule.len()
    }
}

/// A full five-section player-view observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    /// Game time in whole seconds; rendered zero-padded MM:SS.
    pub time_s: u32,
    pub race: Race,
    pub enemy_race: Race,
    pub map_name: String,
    /// Coordinate bounds (width, height). Rendered as a ` (WxH)` suffix of
    /// the Map field exactly when it differs from [`DEFAULT_MAP_SIZE`].
    pub map_size: (u32, u32),
    pub minerals: u32,
    /// Mineral income per minute (the `(+N/min)` figure).
    pub minerals_rate: u32,
    pub gas: u32,
    pub gas_rate: u32,
    pub supply_used: u32,
    pub supply_cap: u32,
    pub supply_army: u32,
    pub supply_workers: u32,
    pub alerts: BTreeSet<String>,
    pub upgrades: BTreeSet<String>,
    pub workers: WorkerSummary,
    pub queue: Vec<QueueEntry>,
    /// Canonical order: worker-kind entities first, then army. The text
    /// format splits them under `> Workers:` / `> Army:` headers, so this
    /// order is what survives a round-trip.
    pub my_units: Vec<Entity>,
    pub my_structures: Vec<Entity>,
    pub enemy_units: Vec<Entity>,
    pub enemy_structures: Vec<Entity>,
    pub snapshot_enemy_structures: Vec<SnapshotEntity>,
}

impl Observation {
    /// A minimal empty observation on the default map.
    pub fn empty(time_s: u32) -> Observation {
        Observation {
            time_s,
            race: Race::Terran,
            enemy_race: Race::Unknown,
            map_name: "Flat64".to_string(),
            map_size: DEFAULT_MAP_SIZE,
            minerals: 0,
            minerals_rate: 0,
            gas: 0,
            gas_rate: 0,
            supply_used: 0,
            supply_cap: 0,
            supply_army: 0,
            supply_workers: 0,
            alerts: BTreeSet::new(),
            upgrades: BTreeSet::new(),
            workers: WorkerSummary::default(),
            queue: Vec::new(),
            my_units: Vec::new(),
            my_structures: Vec::new(),
            enemy_units: Vec::new(),
            enemy_structures: Vec::new(),
            snapshot_enemy_structures: Vec::new(),
        }
    }

    /// Checks every structural invariant. Serialization is total on
    /// observations that pass this check.
    pub fn validate(&self) -> Result<(), String> {
        if self.supply_used != self.supply_army + self.supply_workers {
            return Err(format!(
                "supply mismatch: used {} != army {} + workers {}",
                self.supply_used, self.supply_army, self.supply_workers
            ));
        }
        if self.supply_cap > SUPPLY_CAP_MAX {
            return Err(format!("supply cap {} exceeds engine limit", self.supply_cap));
        }
        let (w, h) = self.map_size;
        let in_bounds = |pos: (i32, i32)| {
            pos.0 >= 0 && pos.1 >= 0 && pos.0 <= w as i32 && pos.1 <= h as i32
        };
        for set in [("alerts", &self.alerts), ("upgrades", &self.upgrades)] {
            for item in set.1 {
                if item.is_empty() || item == "None" || item.contains(',') || item.contains('\n') {
                    return Err(format!("invalid {} item {item:?}", set.0));
                }
            }
        }
        if !self
            .workers
            .mining
            .iter()
            .all(|id| !self.workers.mule.contains(id))
        {
            return Err("worker id in both mining and mule sets".to_string());
        }
        for entry in &self.queue {
            if !in_bounds(entry.pos) {
                return Err(format!("queue entry at {:?} out of bounds", entry.pos));
            }
            if entry.progress_pct >= 100 {
                return Err(format!("queue progress {} not in 0..100", entry.progress_pct));
            }
            if entry.is_construction && entry.task != entry.owner_kind {
                return Err(format!(
                    "construction task {:?} differs from kind {:?}",
                    entry.task, entry.owner_kind
                ));
            }
            check_name(&entry.owner_kind)?;
            check_name(&entry.task)?;
        }
        for (label, list) in [
            ("my_units", &self.my_units),
            ("my_structures", &self.my_structures),
            ("enemy_units", &self.enemy_units),
            ("enemy_structures", &self.enemy_structures),
        ] {
            let mut seen = BTreeSet::new();
            for e in list {
                if !seen.insert(e.id) {
                    return Err(format!("duplicate id {} in {label}", e.id));
                }
                if !in_bounds(e.pos) {
                    return Err(format!("{label} entity {} at {:?} out of bounds", e.id, e.pos));
                }
                if e.hp_pct == 0 || e.hp_pct > 100 {
                    return Err(format!("{label} entity {} hp {} not in 1..=100", e.id, e.hp_pct));
                }
                if let Some(energy) = e.energy_pct {
                    if energy > 100 {
                        return Err(format!("{label} entity {} energy {energy} > 100", e.id));
                    }
                }
                if let Some(status) = &e.status {
                    if status.is_empty() || status.contains(')') || status.contains('\n') {
                        return Err(format!("{label} entity {} has invalid status", e.id));
                    }
                }
                check_name(&e.kind)?;
            }
        }
        for snap in &self.snapshot_enemy_structures {
            if !in_bounds(snap.pos) {
                return Err(format!("snapshot at {:?} out of bounds", snap.pos));
            }
            check_name(&snap.kind)?;
        }
        // Worker-before-army order is part of the canonical form.
        let mut seen_army = false;
        for e in &self.my_units {
            let worker = is_worker_kind(&e.kind);
            if !worker {
                seen_army = true;
            } else if seen_army {
                return Err(format!("worker {} listed after army units", e.id));
            }
        }
        Ok(())
    }

    /// Looks up an own entity (unit or structure) by id.
    pub fn find_own(&self, id: u32) -> Option<&Entity> {
        self.my_units
            .iter()
            .chain(self.my_structures.iter())
            .find(|e| e.id == id)
    }

    /// Unused supply headroom.
    pub fn supply_unused(&self) -> u32 {
        self.supply_cap.saturating_sub(self.supply_used)
    }
}

fn check_name(name: &str) -> Result<(), String> {
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("invalid identifier {name:?}"));
    }
    Ok(())
}

/// Worker classification used to split `[My Units]` into the workers block
/// and the `> Army:` block.
pub fn is_worker_kind(kind: &str) -> bool {
    kind.eq_ignore_ascii_case("scv")
        || kind.eq_ignore_ascii_case("probe")
        || kind.eq_ignore_ascii_case("drone")
        || kind.eq_ignore_ascii_case("mule")
}
