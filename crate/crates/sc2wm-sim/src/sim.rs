use thiserror::Error;

use sc2wm_obs::{is_worker_kind, Entity, Observation, QueueEntry, Target, TimedAction};

use crate::spec::SimConfig;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("kind {kind:?} is not in the unit table")]
    UnknownKind { kind: String },
    #[error("invalid observation: {detail}")]
    InvalidObservation { detail: String },
    #[error("invalid simulator config: {detail}")]
    InvalidConfig { detail: String },
    #[error("delta_s must be >= 1")]
    ZeroHorizon,
}

/// Acceptance record for one issued action.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionOutcome {
    pub action: TimedAction,
    pub accepted: bool,
    /// Rejection reason; `None` when accepted.
    pub reason: Option<String>,
}

/// Notable state transitions, for telemetry.
#[derive(Debug, Clone, PartialEq)]
pub enum SimEvent {
    /// An entity dropped to zero HP and was removed.
    UnitKilled { t_s: u32, mine: bool, kind: String, value: u32, is_army: bool },
    /// A queue entry finished.
    Completed { t_s: u32, kind: String, id: u32 },
}

/// Result of a logged simulation step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub obs: Observation,
    /// One entry per input action, in input order.
    pub actions: Vec<ActionOutcome>,
    pub events: Vec<SimEvent>,
    pub warnings: Vec<String>,
}

/// Advances `obs` by `delta_s` seconds under `actions`.
///
/// Actions are bucketed into one-second substeps by their time offset
/// (an offset in `(k-1, k]` seconds executes during substep `k`), so a
/// five-second call equals five chained one-second calls. Invalid or
/// unaffordable actions are dropped with a warning, never an error.
pub fn simulate(
    obs: &Observation,
    actions: &[TimedAction],
    delta_s: u32,
    cfg: &SimConfig,
) -> Result<Observation, SimError> {
    simulate_logged(obs, actions, delta_s, cfg).map(|outcome| outcome.obs)
}

/// Like [`simulate`], also returning per-action acceptance, kill events, and
/// warnings.
pub fn simulate_logged(
    obs: &Observation,
    actions: &[TimedAction],
    delta_s: u32,
    cfg: &SimConfig,
) -> Result<SimOutcome, SimError> {
    cfg.validate().map_err(|detail| SimError::InvalidConfig { detail })?;
    if delta_s == 0 {
        return Err(SimError::ZeroHorizon);
    }
    obs.validate().map_err(|detail| SimError::InvalidObservation { detail })?;
    check_kinds(obs, cfg)?;

    let mut state = obs.clone();
    let mut log = Log::default();
    for (index, action) in actions.iter().enumerate() {
        if action.substep() >= delta_s {
            log.reject(state.time_s, index, action, "offset beyond simulation horizon");
        }
    }
    for sub in 0..delta_s {
        let bucket: Vec<(usize, &TimedAction)> = actions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.substep() == sub)
            .collect();
        substep(&mut state, &bucket, cfg, &mut log);
    }

    debug_assert_eq!(state.validate(), Ok(()), "simulator must preserve validity");
    let mut outcomes: Vec<ActionOutcome> = actions
        .iter()
        .map(|a| ActionOutcome { action: a.clone(), accepted: true, reason: None })
        .collect();
    for (index, reason) in log.rejections {
        outcomes[index].accepted = false;
        outcomes[index].reason = Some(reason);
    }
    Ok(SimOutcome { obs: state, actions: outcomes, events: log.events, warnings: log.warnings })
}

#[derive(Default)]
struct Log {
    rejections: Vec<(usize, String)>,
    events: Vec<SimEvent>,
    warnings: Vec<String>,
}

impl Log {
    fn reject(&mut self, t_s: u32, index: usize, action: &TimedAction, reason: impl Into<String>) {
        let reason = reason.into();
        self.warnings.push(format!("t={t_s}: dropped [{action}]: {reason}"));
        self.rejections.push((index, reason));
    }
}

fn check_kinds(obs: &Observation, cfg: &SimConfig) -> Result<(), SimError> {
    let unknown = |kind: &str| SimError::UnknownKind { kind: kind.to_string() };
    for e in obs
        .my_units
        .iter()
        .chain(&obs.my_structures)
        .chain(&obs.enemy_units)
        .chain(&obs.enemy_structures)
    {
        if cfg.units.get(&e.kind).is_none() {
            return Err(unknown(&e.kind));
        }
    }
    for s in &obs.snapshot_enemy_structures {
        if cfg.units.get(&s.kind).is_none() {
            return Err(unknown(&s.kind));
        }
    }
    for q in &obs.queue {
        if q.is_construction && cfg.units.get(&q.owner_kind).is_none() {
            return Err(unknown(&q.owner_kind));
        }
    }
    Ok(())
}

/// One second of game mechanics, rules applied in order: time, resources,
/// queue, actions, movement, combat, visibility.
fn substep(state: &mut Observation, bucket: &[(usize, &TimedAction)], cfg: &SimConfig, log: &mut Log) {
    state.time_s += 1;
    accrue_resources(state);
    tick_queue(state, cfg, log);
    let mut next_id = next_free_id(state);
    for &(index, action) in bucket {
        apply_action(state, index, action, cfg, log, &mut next_id);
    }
    step_motion(state, cfg);
    combat(state, cfg, log);
    recompute_visibility(state, cfg);
}

/// Rule 2 accrual: `floor(rate * t / 60)` telescoped on absolute game time,
/// so chained one-second steps accumulate exactly what one larger step does.
fn accrue_resources(state: &mut Observation) {
    let t1 = state.time_s as u64;
    let t0 = t1 - 1;
    let gain = |rate: u32| (rate as u64 * t1 / 60 - rate as u64 * t0 / 60) as u32;
    state.minerals += gain(state.minerals_rate);
    state.gas += gain(state.gas_rate);
}

fn next_free_id(state: &Observation) -> u32 {
    let mut max = 0;
    for e in state
        .my_units
        .iter()
        .chain(&state.my_structures)
        .chain(&state.enemy_units)
        .chain(&state.enemy_structures)
    {
        max = max.max(e.id);
    }
    for q in &state.queue {
        max = max.max(q.owner_id);
    }
    for &id in state.workers.mining.iter().chain(&state.workers.mule) {
        max = max.max(id);
    }
    max + 1
}

/// The product a queue entry is working toward, resolved from its task.
fn queue_product(entry: &QueueEntry) -> Option<String> {
    if entry.is_construction {
        return Some(entry.owner_kind.clone());
    }
    if let Some(at) = entry.task.find("train_") {
        return Some(entry.task[at + "train_".len()..].to_string());
    }
    if entry.task.starts_with("Upgradeto") {
        if let Some(at) = entry.task.rfind('_') {
            return Some(entry.task[at + 1..].to_string());
        }
    }
    None
}

/// Rule 4: integer progress per second with completion effects. Entries
/// enqueued by this substep's actions start ticking next second because the
/// queue advances before actions apply.
fn tick_queue(state: &mut Observation, cfg: &SimConfig, log: &mut Log) {
    const DEFAULT_NOMINAL_S: u32 = 30;
    let mut completed = Vec::new();
    for (i, entry) in state.queue.iter_mut().enumerate() {
        let nominal = match queue_product(entry).and_then(|p| cfg.units.get_ci(&p)) {
            Some(spec) => spec.build_time_s,
            None => {
                if !entry.is_construction {
                    log.warnings.push(format!(
                        "t={}: queue task {:?} has no table entry; using default build time",
                        state.time_s, entry.task
                    ));
                }
                DEFAULT_NOMINAL_S
            }
        };
        entry.progress_pct += cfg.progress_per_second(nominal);
        if entry.progress_pct >= 100 {
            completed.push(i);
        }
    }
    for i in completed.into_iter().rev() {
        let entry = state.queue.remove(i);
        complete_entry(state, &entry, cfg, log);
    }
}

fn complete_entry(state: &mut Observation, entry: &QueueEntry, cfg: &SimConfig, log: &mut Log) {
    let t_s = state.time_s;
    if entry.is_construction {
        // The structure becomes real: it enters the structure list and
        // provides supply from now on.
        state.my_structures.push(Entity::new(entry.owner_id, &entry.owner_kind, entry.pos, 100));
        if let Some(spec) = cfg.units.get(&entry.owner_kind) {
            state.supply_cap = (state.supply_cap + spec.supply_provided).min(sc2wm_obs::SUPPLY_CAP_MAX);
        }
        log.events.push(SimEvent::Completed {
            t_s,
            kind: entry.owner_kind.clone(),
            id: entry.owner_id,
        });
        return;
    }
    if entry.task.starts_with("Upgradeto") {
        let Some(product) = queue_product(entry).and_then(|p| cfg.units.get_ci(&p)).cloned() else {
            return;
        };
        let old_provided = cfg.units.get(&entry.owner_kind).map_or(0, |s| s.supply_provided);
        if let Some(owner) = state.my_structures.iter_mut().find(|s| s.id == entry.owner_id) {
            owner.kind = product.kind.clone();
            state.supply_cap = (state.supply_cap + product.supply_provided)
                .saturating_sub(old_provided)
                .min(sc2wm_obs::SUPPLY_CAP_MAX);
            log.events.push(SimEvent::Completed { t_s, kind: product.kind, id: entry.owner_id });
        }
        return;
    }
    // Production: the unit spawns at its producer (or at the recorded
    // position if the producer died mid-train). Supply was paid at enqueue.
    let Some(product) = queue_product(entry).and_then(|p| cfg.units.get_ci(&p)).cloned() else {
        return;
    };
    let pos = state
        .my_structures
        .iter()
        .find(|s| s.id == entry.owner_id)
        .map_or(entry.pos, |s| s.pos);
    let id = next_free_id(state);
    if is_worker_kind(&product.kind) {
        // Fresh workers head straight to the mineral line.
        state.workers.mining.insert(id);
        state.minerals_rate += cfg.income_per_worker.round() as u32;
    } else {
        state.my_units.push(Entity::new(id, &product.kind, pos, 100));
    }
    log.events.push(SimEvent::Completed { t_s, kind: product.kind, id });
}

fn parse_point(target: &Target, state: &Observation) -> Option<(i32, i32)> {
    match target {
        Target::Point(x, y) => Some((*x, *y)),
        Target::Entity { id, .. } => state
            .my_units
            .iter()
            .chain(&state.my_structures)
            .chain(&state.enemy_units)
            .chain(&state.enemy_structures)
            .find(|e| e.id == *id)
            .map(|e| e.pos),
        Target::None => None,
    }
}

enum Subject {
    Unit(usize),
    Structure(usize),
    /// An aggregated worker from the mining/mule roster.
    RosterWorker,
}

fn find_subject(state: &Observation, id: u32) -> Option<Subject> {
    if let Some(i) = state.my_units.iter().position(|e| e.id == id) {
        return Some(Subject::Unit(i));
    }
    if let Some(i) = state.my_structures.iter().position(|e| e.id == id) {
        return Some(Subject::Structure(i));
    }
    if state.workers.mining.contains(&id) || state.workers.mule.contains(&id) {
        return Some(Subject::RosterWorker);
    }
    None
}

fn apply_action(
    state: &mut Observation,
    index: usize,
    action: &TimedAction,
    cfg: &SimConfig,
    log: &mut Log,
    next_id: &mut u32,
) {
    let t_s = state.time_s;
    let Some(subject) = find_subject(state, action.subject_id) else {
        log.reject(t_s, index, action, format!("unknown subject id {}", action.subject_id));
        return;
    };
    let cmd = action.command.as_str();

    if let Some(at) = cmd.find("train_") {
        let product = cmd[at + "train_".len()..].to_string();
        train(state, index, action, &product, cfg, log);
        return;
    }
    if let Some(product) = cmd.strip_prefix("Build_") {
        build(state, index, action, &subject, product, cfg, log, next_id);
        return;
    }
    if cmd.starts_with("Upgradeto") && cmd.contains('_') {
        let product = cmd[cmd.rfind('_').unwrap() + 1..].to_string();
        morph(state, index, action, &product, cfg, log);
        return;
    }
    match cmd {
        "Morph_supplydepot_lower" | "Morph_supplydepot_raise" => {
            if let Subject::Structure(i) = subject {
                let depot = &mut state.my_structures[i];
                if cmd.ends_with("lower") && depot.kind == "Supplydepot" {
                    depot.kind = "Supplydepotlowered".to_string();
                } else if cmd.ends_with("raise") && depot.kind == "Supplydepotlowered" {
                    depot.kind = "Supplydepot".to_string();
                }
            }
        }
        "Move" | "Attack" | "Patrol" => {
            let Some(dest) = parse_point(&action.target, state) else {
                // Entity targets may reference units we cannot see; treat as
                // a no-op rather than a rejection.
                return;
            };
            if let Subject::Unit(i) = subject {
                let mobile = cfg.units.get(&state.my_units[i].kind).is_some_and(|s| s.speed > 0.0);
                if mobile {
                    let verb = if cmd == "Attack" { "attacking" } else { "moving to" };
                    state.my_units[i].status = Some(format!("{verb} [{}, {}]", dest.0, dest.1));
                }
            }
        }
        "Stop" | "Holdposition" => {
            if let Subject::Unit(i) = subject {
                state.my_units[i].status = None;
            }
        }
        // Smart commands, harvest orders, and unmodeled abilities are valid
        // engine commands with no effect in this rule set.
        _ => {}
    }
}

fn train(
    state: &mut Observation,
    index: usize,
    action: &TimedAction,
    product: &str,
    cfg: &SimConfig,
    log: &mut Log,
) {
    let t_s = state.time_s;
    let Some(spec) = cfg.units.get_ci(product).cloned() else {
        log.reject(t_s, index, action, format!("unknown product {product:?}"));
        return;
    };
    let Some(owner) = state.my_structures.iter().find(|s| s.id == action.subject_id) else {
        log.reject(t_s, index, action, "trainer is not an own structure");
        return;
    };
    let (owner_id, owner_kind, owner_pos) = (owner.id, owner.kind.clone(), owner.pos);
    if state.minerals < spec.mineral_cost || state.gas < spec.gas_cost {
        log.reject(t_s, index, action, "insufficient resources");
        return;
    }
    if spec.supply_cost > 0 && state.supply_used + spec.supply_cost > state.supply_cap {
        log.reject(t_s, index, action, "supply blocked");
        return;
    }
    state.minerals -= spec.mineral_cost;
    state.gas -= spec.gas_cost;
    state.supply_used += spec.supply_cost;
    if is_worker_kind(&spec.kind) {
        state.supply_workers += spec.supply_cost;
    } else {
        state.supply_army += spec.supply_cost;
    }
    state.queue.push(QueueEntry {
        owner_id,
        owner_kind,
        pos: owner_pos,
        task: action.command.clone(),
        progress_pct: 0,
        is_construction: false,
    });
}

#[allow(clippy::too_many_arguments)]
fn build(
    state: &mut Observation,
    index: usize,
    action: &TimedAction,
    subject: &Subject,
    product: &str,
    cfg: &SimConfig,
    log: &mut Log,
    next_id: &mut u32,
) {
    let t_s = state.time_s;
    if matches!(subject, Subject::Structure(_)) {
        log.reject(t_s, index, action, "structures cannot construct buildings");
        return;
    }
    let Some(spec) = cfg.units.get_ci(product).cloned() else {
        log.reject(t_s, index, action, format!("unknown product {product:?}"));
        return;
    };
    if !spec.is_structure {
        log.reject(t_s, index, action, format!("{} is not a structure", spec.kind));
        return;
    }
    let Target::Point(x, y) = action.target else {
        log.reject(t_s, index, action, "construction needs a point target");
        return;
    };
    if state.minerals < spec.mineral_cost || state.gas < spec.gas_cost {
        log.reject(t_s, index, action, "insufficient resources");
        return;
    }
    let (w, h) = state.map_size;
    let pos = (x.clamp(0, w as i32), y.clamp(0, h as i32));
    state.minerals -= spec.mineral_cost;
    state.gas -= spec.gas_cost;
    state.queue.push(QueueEntry {
        owner_id: *next_id,
        owner_kind: spec.kind.clone(),
        pos,
        task: spec.kind.clone(),
        progress_pct: 0,
        is_construction: true,
    });
    *next_id += 1;
}

fn morph(
    state: &mut Observation,
    index: usize,
    action: &TimedAction,
    product: &str,
    cfg: &SimConfig,
    log: &mut Log,
) {
    let t_s = state.time_s;
    let Some(spec) = cfg.units.get_ci(product).cloned() else {
        log.reject(t_s, index, action, format!("unknown product {product:?}"));
        return;
    };
    let Some(owner) = state.my_structures.iter().find(|s| s.id == action.subject_id) else {
        log.reject(t_s, index, action, "morph subject is not an own structure");
        return;
    };
    let (owner_id, owner_kind, owner_pos) = (owner.id, owner.kind.clone(), owner.pos);
    if state.minerals < spec.mineral_cost || state.gas < spec.gas_cost {
        log.reject(t_s, index, action, "insufficient resources");
        return;
    }
    if state.queue.iter().any(|q| q.owner_id == owner_id && q.task.starts_with("Upgradeto")) {
        log.reject(t_s, index, action, "morph already in progress");
        return;
    }
    state.minerals -= spec.mineral_cost;
    state.gas -= spec.gas_cost;
    state.queue.push(QueueEntry {
        owner_id,
        owner_kind,
        pos: owner_pos,
        task: action.command.clone(),
        progress_pct: 0,
        is_construction: false,
    });
}

/// Decodes a kinematic status: `"moving to [x, y]"` or `"attacking [x, y]"`.
/// The waypoint lives in the status text so motion survives the round trip
/// through observation text and multi-step calls stay Markov.
fn motion_target(status: &str) -> Option<(i32, i32)> {
    let rest = status
        .strip_prefix("moving to [")
        .or_else(|| status.strip_prefix("attacking ["))?;
    let inner = rest.strip_suffix(']')?;
    let (x, y) = inner.split_once(", ")?;
    Some((x.parse().ok()?, y.parse().ok()?))
}

/// Rule 5: each motion-status unit advances `min(remaining, speed)` map
/// units; on arrival the status clears.
fn step_motion(state: &mut Observation, cfg: &SimConfig) {
    let units = &cfg.units;
    for list in [&mut state.my_units, &mut state.enemy_units] {
        for e in list.iter_mut() {
            let Some(status) = &e.status else { continue };
            let Some(dest) = motion_target(status) else { continue };
            let speed = units.get(&e.kind).map_or(0.0, |s| s.speed);
            if speed <= 0.0 {
                continue;
            }
            let dx = (dest.0 - e.pos.0) as f64;
            let dy = (dest.1 - e.pos.1) as f64;
            let dist = (dx * dx + dy * dy).sqrt();
            if dist <= speed {
                e.pos = dest;
                e.status = None;
            } else {
                e.pos.0 += (dx / dist * speed).round() as i32;
                e.pos.1 += (dy / dist * speed).round() as i32;
            }
        }
    }
}

struct Combatant {
    mine: bool,
    structure: bool,
    index: usize,
    id: u32,
    pos: (i32, i32),
    dps: f64,
    max_hp: u32,
}

struct Strike {
    mine: bool,
    structure: bool,
    index: usize,
    damage_pct: u32,
}

/// Rule 7: every armed entity hits its nearest opponent within the combat
/// radius (ties broken toward the lowest id), all strikes resolve
/// simultaneously, and anything at 0 HP is removed. Damage lands as a
/// percentage of the target's max HP, at least one point per second.
fn combat(state: &mut Observation, cfg: &SimConfig, log: &mut Log) {
    let gather = |units: &[Entity], structures: &[Entity], mine: bool| -> Vec<Combatant> {
        let mut side = Vec::new();
        for (structure, list) in [(false, units), (true, structures)] {
            for (index, e) in list.iter().enumerate() {
                if let Some(spec) = cfg.units.get(&e.kind) {
                    side.push(Combatant {
                        mine,
                        structure,
                        index,
                        id: e.id,
                        pos: e.pos,
                        dps: spec.dps,
                        max_hp: spec.max_hp,
                    });
                }
            }
        }
        side
    };
    let mine = gather(&state.my_units, &state.my_structures, true);
    let theirs = gather(&state.enemy_units, &state.enemy_structures, false);
    if mine.is_empty() || theirs.is_empty() {
        return;
    }

    let mut strikes: Vec<Strike> = Vec::new();
    let radius2 = cfg.combat_radius * cfg.combat_radius;
    for (attackers, defenders) in [(&mine, &theirs), (&theirs, &mine)] {
        for attacker in attackers.iter().filter(|a| a.dps > 0.0) {
            let nearest = defenders
                .iter()
                .map(|d| {
                    let dx = (attacker.pos.0 - d.pos.0) as f64;
                    let dy = (attacker.pos.1 - d.pos.1) as f64;
                    (dx * dx + dy * dy, d)
                })
                .filter(|(d2, _)| *d2 <= radius2)
                .min_by(|a, b| {
                    a.0.partial_cmp(&b.0)
                        .expect("distances are finite")
                        .then(a.1.id.cmp(&b.1.id))
                });
            if let Some((_, target)) = nearest {
                let damage = ((100.0 * attacker.dps / target.max_hp as f64).round() as u32).max(1);
                strikes.push(Strike {
                    mine: target.mine,
                    structure: target.structure,
                    index: target.index,
                    damage_pct: damage,
                });
            }
        }
    }
    if strikes.is_empty() {
        return;
    }

    let t_s = state.time_s;
    let apply = |list: &mut Vec<Entity>, hits: Vec<&Strike>| -> Vec<Entity> {
        for strike in &hits {
            let e = &mut list[strike.index];
            e.hp_pct = e.hp_pct.saturating_sub(strike.damage_pct);
        }
        let mut dead = Vec::new();
        let mut i = 0;
        while i < list.len() {
            if list[i].hp_pct == 0 {
                dead.push(list.remove(i));
            } else {
                i += 1;
            }
        }
        dead
    };
    fn select(strikes: &[Strike], mine: bool, structure: bool) -> Vec<&Strike> {
        strikes.iter().filter(|s| s.mine == mine && s.structure == structure).collect()
    }

    let dead_my_units = apply(&mut state.my_units, select(&strikes, true, false));
    let dead_my_structs = apply(&mut state.my_structures, select(&strikes, true, true));
    let dead_enemy_units = apply(&mut state.enemy_units, select(&strikes, false, false));
    let dead_enemy_structs = apply(&mut state.enemy_structures, select(&strikes, false, true));

    for e in &dead_my_units {
        if let Some(spec) = cfg.units.get(&e.kind) {
            let dec = spec.supply_cost.min(state.supply_used);
            state.supply_used -= dec;
            if is_worker_kind(&e.kind) {
                state.supply_workers = state.supply_workers.saturating_sub(dec);
            } else {
                state.supply_army = state.supply_army.saturating_sub(dec);
            }
        }
        if state.workers.mining.remove(&e.id) {
            state.minerals_rate =
                state.minerals_rate.saturating_sub(cfg.income_per_worker.round() as u32);
        }
        state.workers.mule.remove(&e.id);
    }
    for e in &dead_my_structs {
        if let Some(spec) = cfg.units.get(&e.kind) {
            state.supply_cap = state.supply_cap.saturating_sub(spec.supply_provided);
        }
    }
    for (mine, dead) in [
        (true, dead_my_units.iter().chain(&dead_my_structs)),
        (false, dead_enemy_units.iter().chain(&dead_enemy_structs)),
    ] {
        for e in dead {
            let (value, is_army) = match cfg.units.get(&e.kind) {
                Some(spec) => (
                    spec.mineral_cost + spec.gas_cost,
                    !spec.is_structure && !is_worker_kind(&e.kind),
                ),
                None => (0, false),
            };
            log.events.push(SimEvent::UnitKilled {
                t_s,
                mine,
                kind: e.kind.clone(),
                value,
                is_army,
            });
        }
    }
}

/// Rule 8: an enemy entity is visible while inside some own entity's sight
/// radius. Units in the fog disappear; structures in the fog persist as
/// snapshots at their last seen position. Scouting a snapshot's position
/// turns it back into a visible structure (buildings are assumed to stay
/// put; they get a fresh id because snapshots carry none).
fn recompute_visibility(state: &mut Observation, cfg: &SimConfig) {
    let eyes: Vec<((i32, i32), f64)> = state
        .my_units
        .iter()
        .chain(&state.my_structures)
        .map(|e| (e.pos, cfg.units.get(&e.kind).map_or(0.0, |s| s.sight)))
        .collect();
    let visible = |pos: (i32, i32)| -> bool {
        eyes.iter().any(|&((x, y), sight)| {
            let dx = (x - pos.0) as f64;
            let dy = (y - pos.1) as f64;
            dx * dx + dy * dy <= sight * sight
        })
    };

    state.enemy_units.retain(|e| visible(e.pos));
    let mut hidden = Vec::new();
    state.enemy_structures.retain(|e| {
        if visible(e.pos) {
            true
        } else {
            hidden.push(e.clone());
            false
        }
    });
    for e in hidden {
        let already = state
            .snapshot_enemy_structures
            .iter()
            .any(|s| s.kind == e.kind && s.pos == e.pos);
        if !already {
            state
                .snapshot_enemy_structures
                .push(sc2wm_obs::SnapshotEntity { kind: e.kind, pos: e.pos });
        }
    }
    let mut rescouted = Vec::new();
    state.snapshot_enemy_structures.retain(|s| {
        if visible(s.pos) {
            rescouted.push(s.clone());
            false
        } else {
            true
        }
    });
    for s in rescouted {
        let id = next_free_id(state);
        state.enemy_structures.push(Entity::new(id, &s.kind, s.pos, 100));
    }
}
