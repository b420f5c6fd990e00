use std::fmt::Write;

use crate::types::{is_worker_kind, Entity, Observation, DEFAULT_MAP_SIZE};

/// Renders an observation in the canonical textual format.
///
/// Total on observations that satisfy [`Observation::validate`]. Each section
/// block ends with one blank line, so the result ends with `"\n\n"` and
/// sections are separated by exactly one blank line.
pub fn serialize_observation(obs: &Observation) -> String {
    let mut out = String::with_capacity(2048);

    out.push_str("[Info]\n");
    let minutes = obs.time_s / 60;
    let seconds = obs.time_s % 60;
    write!(
        out,
        "Time: {minutes:02}:{seconds:02} | Race: {} | Enemy Race: {} | Map: {}",
        obs.race, obs.enemy_race, obs.map_name
    )
    .unwrap();
    if obs.map_size != DEFAULT_MAP_SIZE {
        write!(out, " ({}x{})", obs.map_size.0, obs.map_size.1).unwrap();
    }
    writeln!(
        out,
        "\nMinerals: {} (+{}/min) | Gas: {} (+{}/min)",
        obs.minerals, obs.minerals_rate, obs.gas, obs.gas_rate
    )
    .unwrap();
    writeln!(
        out,
        "Supply: {}/{} (Army: {}, Workers: {})",
        obs.supply_used, obs.supply_cap, obs.supply_army, obs.supply_workers
    )
    .unwrap();
    writeln!(out, "Alerts: {}", render_set(&obs.alerts)).unwrap();
    writeln!(out, "Upgrades: {}", render_set(&obs.upgrades)).unwrap();
    out.push('\n');

    out.push_str("[Queue]\n");
    if obs.queue.is_empty() {
        out.push_str("[Empty]\n");
    }
    for entry in &obs.queue {
        if entry.is_construction {
            writeln!(
                out,
                " - Constructing: {} [{}] at ({},{}) ({}%)",
                entry.owner_kind, entry.owner_id, entry.pos.0, entry.pos.1, entry.progress_pct
            )
            .unwrap();
        } else {
            writeln!(
                out,
                " - {} [{}] at ({},{}): {} ({}%)",
                entry.owner_kind, entry.owner_id, entry.pos.0, entry.pos.1, entry.task,
                entry.progress_pct
            )
            .unwrap();
        }
    }
    out.push('\n');

    out.push_str("[My Units]\n");
    let (workers, army): (Vec<&Entity>, Vec<&Entity>) =
        obs.my_units.iter().partition(|e| is_worker_kind(&e.kind));
    if obs.workers.is_empty() && obs.my_units.is_empty() {
        out.push_str("[Empty]\n");
    } else {
        if !obs.workers.is_empty() {
            writeln!(
                out,
                "> Workers: ({}Mining:[{}], {}Mule:[{}])",
                obs.workers.mining.len(),
                render_ids(&obs.workers.mining),
                obs.workers.mule.len(),
                render_ids(&obs.workers.mule)
            )
            .unwrap();
        }
        for entity in workers {
            write_entity(&mut out, entity);
        }
        if !army.is_empty() {
            out.push_str("> Army:\n");
            for entity in army {
                write_entity(&mut out, entity);
            }
        }
    }
    out.push('\n');

    out.push_str("[My Structures]\n");
    if obs.my_structures.is_empty() {
        out.push_str("[Empty]\n");
    }
    for entity in &obs.my_structures {
        write_entity(&mut out, entity);
    }
    out.push('\n');

    out.push_str("[Visible Hostiles]\n");
    if obs.enemy_units.is_empty()
        && obs.enemy_structures.is_empty()
        && obs.snapshot_enemy_structures.is_empty()
    {
        out.push_str("[Empty]\n");
    } else {
        if !obs.enemy_units.is_empty() {
            out.push_str("> Enemy Units:\n");
            for entity in &obs.enemy_units {
                write_entity(&mut out, entity);
            }
        }
        if !obs.enemy_structures.is_empty() {
            out.push_str("> Enemy Structures:\n");
            for entity in &obs.enemy_structures {
                write_entity(&mut out, entity);
            }
        }
        if !obs.snapshot_enemy_structures.is_empty() {
            out.push_str("> Snapshot Enemy Structures:\n");
            for snap in &obs.snapshot_enemy_structures {
                writeln!(out, " - {} at ({},{})", snap.kind, snap.pos.0, snap.pos.1).unwrap();
            }
        }
    }
    out.push('\n');

    out
}

fn write_entity(out: &mut String, e: &Entity) {
    write!(
        out,
        " - {} [{}] at ({},{}) (HP:{}%",
        e.kind, e.id, e.pos.0, e.pos.1, e.hp_pct
    )
    .unwrap();
    if let Some(energy) = e.energy_pct {
        write!(out, ", Energy:{energy}%").unwrap();
    }
    if let Some(status) = &e.status {
        write!(out, ", Status:{status}").unwrap();
    }
    out.push_str(")\n");
}

fn render_set(set: &std::collections::BTreeSet<String>) -> String {
    if set.is_empty() {
        "None".to_string()
    } else {
        set.iter().cloned().collect::<Vec<_>>().join(", ")
    }
}

fn render_ids(ids: &std::collections::BTreeSet<u32>) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
