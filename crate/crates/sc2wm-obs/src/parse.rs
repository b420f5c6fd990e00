use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::ParseError;
use crate::types::{
    Entity, Observation, QueueEntry, Race, SnapshotEntity, WorkerSummary, DEFAULT_MAP_SIZE,
};

static INFO_HEAD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Time: (\d+):(\d{2}) \| Race: (.+?) \| Enemy Race: (.+?) \| Map: (.+)$").unwrap()
});
static MAP_SIZE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(.*?) \((\d+)x(\d+)\)$").unwrap());
static INFO_ECON: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Minerals: (\d+) \(\+(\d+)/min\) \| Gas: (\d+) \(\+(\d+)/min\)$").unwrap()
});
static INFO_SUPPLY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Supply: (\d+)/(\d+) \(Army: (\d+), Workers: (\d+)\)$").unwrap()
});
static QUEUE_TASK: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^ - ([A-Za-z0-9_]+) \[(\d+)\] at \((\d+),(\d+)\): ([A-Za-z0-9_]+) \((\d+)%\)$")
        .unwrap()
});
static QUEUE_CONSTR: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^ - Constructing: ([A-Za-z0-9_]+) \[(\d+)\] at \((\d+),(\d+)\) \((\d+)%\)$")
        .unwrap()
});
static ENTITY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^ - ([A-Za-z0-9_]+) \[(\d+)\] at \((\d+),(\d+)\) \(HP:(\d+)%(?:, Energy:(\d+)%)?(?:, Status:([^)]+))?\)$",
    )
    .unwrap()
});
static SNAPSHOT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^ - ([A-Za-z0-9_]+) at \((\d+),(\d+)\)$").unwrap());
static WORKERS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^> Workers: \((\d+)Mining:\[([0-9,]*)\], (\d+)Mule:\[([0-9,]*)\]\)$").unwrap()
});

const SECTIONS: [&str; 5] = [
    "[Info]",
    "[Queue]",
    "[My Units]",
    "[My Structures]",
    "[Visible Hostiles]",
];

struct Cursor<'a> {
    lines: Vec<&'a str>,
    /// Index of the next unread line (0-based; line numbers are index + 1).
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<&'a str> {
        let line = self.peek();
        if line.is_some() {
            self.pos += 1;
        }
        line
    }

    fn line_no(&self) -> usize {
        self.pos + 1
    }

    fn skip_blanks(&mut self) {
        while self.peek() == Some("") {
            self.pos += 1;
        }
    }
}

/// Parses the five-section textual observation format.
///
/// The text must begin with the `[Info]` tag; sections must appear in
/// canonical order. Every line is either consumed by the grammar or reported
/// in the returned error.
pub fn parse_observation(text: &str) -> Result<Observation, ParseError> {
    let mut cur = Cursor {
        lines: text.split('\n').collect(),
        pos: 0,
    };
    let mut obs = Observation::empty(0);

    expect_header(&mut cur, 0)?;
    parse_info(&mut cur, &mut obs)?;
    expect_header(&mut cur, 1)?;
    parse_queue(&mut cur, &mut obs)?;
    expect_header(&mut cur, 2)?;
    parse_my_units(&mut cur, &mut obs)?;
    expect_header(&mut cur, 3)?;
    parse_my_structures(&mut cur, &mut obs)?;
    expect_header(&mut cur, 4)?;
    parse_hostiles(&mut cur, &mut obs)?;

    cur.skip_blanks();
    if let Some(extra) = cur.peek() {
        return Err(ParseError::MalformedLine {
            line: cur.line_no(),
            section: "[Visible Hostiles]".to_string(),
            content: extra.to_string(),
        });
    }
    Ok(obs)
}

fn expect_header(cur: &mut Cursor, index: usize) -> Result<(), ParseError> {
    cur.skip_blanks();
    let line_no = cur.line_no();
    match cur.next() {
        Some(line) if line == SECTIONS[index] => Ok(()),
        Some(line) => Err(ParseError::MalformedSection {
            line: line_no,
            detail: format!("expected section header {:?}, found {line:?}", SECTIONS[index]),
        }),
        None => Err(ParseError::MalformedSection {
            line: line_no,
            detail: format!("missing section header {:?}", SECTIONS[index]),
        }),
    }
}

/// Reads body lines of the current section: every line up to the next blank
/// line or end of input. Returns (line_no, line) pairs.
fn body_lines<'a>(cur: &mut Cursor<'a>) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    while let Some(line) = cur.peek() {
        if line.is_empty() {
            break;
        }
        out.push((cur.line_no(), line));
        cur.pos += 1;
    }
    out
}

fn malformed(line: usize, section: &str, content: &str) -> ParseError {
    ParseError::MalformedLine {
        line,
        section: section.to_string(),
        content: content.to_string(),
    }
}

fn parse_info(cur: &mut Cursor, obs: &mut Observation) -> Result<(), ParseError> {
    const SECTION: &str = "[Info]";
    let body = body_lines(cur);
    if body.len() != 5 {
        let (line, content) = body
            .get(5)
            .copied()
            .unwrap_or((cur.line_no(), ""));
        return Err(malformed(line, SECTION, content));
    }

    let (line, text) = body[0];
    let caps = INFO_HEAD
        .captures(text)
        .ok_or_else(|| malformed(line, SECTION, text))?;
    let minutes: u32 = parse_num(&caps[1], line, SECTION, text)?;
    let seconds: u32 = parse_num(&caps[2], line, SECTION, text)?;
    if seconds >= 60 {
        return Err(malformed(line, SECTION, text));
    }
    obs.time_s = minutes * 60 + seconds;
    obs.race = Race::parse(&caps[3]);
    obs.enemy_race = Race::parse(&caps[4]);
    let map_field = &caps[5];
    if let Some(size) = MAP_SIZE.captures(map_field) {
        obs.map_name = size[1].to_string();
        obs.map_size = (
            parse_num(&size[2], line, SECTION, text)?,
            parse_num(&size[3], line, SECTION, text)?,
        );
    } else {
        obs.map_name = map_field.to_string();
        obs.map_size = DEFAULT_MAP_SIZE;
    }

    let (line, text) = body[1];
    let caps = INFO_ECON
        .captures(text)
        .ok_or_else(|| malformed(line, SECTION, text))?;
    obs.minerals = parse_num(&caps[1], line, SECTION, text)?;
    obs.minerals_rate = parse_num(&caps[2], line, SECTION, text)?;
    obs.gas = parse_num(&caps[3], line, SECTION, text)?;
    obs.gas_rate = parse_num(&caps[4], line, SECTION, text)?;

    let (line, text) = body[2];
    let caps = INFO_SUPPLY
        .captures(text)
        .ok_or_else(|| malformed(line, SECTION, text))?;
    obs.supply_used = parse_num(&caps[1], line, SECTION, text)?;
    obs.supply_cap = parse_num(&caps[2], line, SECTION, text)?;
    obs.supply_army = parse_num(&caps[3], line, SECTION, text)?;
    obs.supply_workers = parse_num(&caps[4], line, SECTION, text)?;

    obs.alerts = parse_set(body[3], "Alerts: ", SECTION)?;
    obs.upgrades = parse_set(body[4], "Upgrades: ", SECTION)?;
    Ok(())
}

fn parse_set(
    (line, text): (usize, &str),
    prefix: &str,
    section: &str,
) -> Result<BTreeSet<String>, ParseError> {
    let rest = text
        .strip_prefix(prefix)
        .ok_or_else(|| malformed(line, section, text))?;
    if rest == "None" {
        return Ok(BTreeSet::new());
    }
    if rest.is_empty() {
        return Err(malformed(line, section, text));
    }
    let mut set = BTreeSet::new();
    for item in rest.split(", ") {
        if item.is_empty() || item == "None" {
            return Err(malformed(line, section, text));
        }
        set.insert(item.to_string());
    }
    Ok(set)
}

fn parse_queue(cur: &mut Cursor, obs: &mut Observation) -> Result<(), ParseError> {
    const SECTION: &str = "[Queue]";
    let body = body_lines(cur);
    if is_empty_marker(&body) {
        return Ok(());
    }
    for (line, text) in body {
        let entry = if let Some(caps) = QUEUE_CONSTR.captures(text) {
            let kind = caps[1].to_string();
            QueueEntry {
                owner_id: parse_num(&caps[2], line, SECTION, text)?,
                owner_kind: kind.clone(),
                pos: parse_pos(&caps[3], &caps[4], line, obs.map_size)?,
                task: kind,
                progress_pct: parse_num(&caps[5], line, SECTION, text)?,
                is_construction: true,
            }
        } else if let Some(caps) = QUEUE_TASK.captures(text) {
            QueueEntry {
                owner_kind: caps[1].to_string(),
                owner_id: parse_num(&caps[2], line, SECTION, text)?,
                pos: parse_pos(&caps[3], &caps[4], line, obs.map_size)?,
                task: caps[5].to_string(),
                progress_pct: parse_num(&caps[6], line, SECTION, text)?,
                is_construction: false,
            }
        } else {
            return Err(malformed(line, SECTION, text));
        };
        obs.queue.push(entry);
    }
    Ok(())
}

fn parse_my_units(cur: &mut Cursor, obs: &mut Observation) -> Result<(), ParseError> {
    const SECTION: &str = "[My Units]";
    let body = body_lines(cur);
    if is_empty_marker(&body) {
        return Ok(());
    }
    for (line, text) in body {
        if let Some(caps) = WORKERS.captures(text) {
            let summary = WorkerSummary {
                mining: parse_id_set(&caps[2], line, SECTION, text)?,
                mule: parse_id_set(&caps[4], line, SECTION, text)?,
            };
            let mining_count: usize = parse_num(&caps[1], line, SECTION, text)?;
            let mule_count: usize = parse_num(&caps[3], line, SECTION, text)?;
            if mining_count != summary.mining.len() || mule_count != summary.mule.len() {
                return Err(malformed(line, SECTION, text));
            }
            obs.workers = summary;
        } else if text == "> Army:" {
            // Marker only; placement is implied by kind on the way back out.
        } else {
            obs.my_units.push(parse_entity(line, text, SECTION, obs.map_size)?);
        }
    }
    Ok(())
}

fn parse_my_structures(cur: &mut Cursor, obs: &mut Observation) -> Result<(), ParseError> {
    const SECTION: &str = "[My Structures]";
    let body = body_lines(cur);
    if is_empty_marker(&body) {
        return Ok(());
    }
    for (line, text) in body {
        obs.my_structures
            .push(parse_entity(line, text, SECTION, obs.map_size)?);
    }
    Ok(())
}

fn parse_hostiles(cur: &mut Cursor, obs: &mut Observation) -> Result<(), ParseError> {
    const SECTION: &str = "[Visible Hostiles]";
    let body = body_lines(cur);
    if is_empty_marker(&body) {
        return Ok(());
    }
    #[derive(PartialEq)]
    enum Block {
        None,
        Units,
        Structures,
        Snapshots,
    }
    let mut block = Block::None;
    for (line, text) in body {
        match text {
            "> Enemy Units:" => block = Block::Units,
            "> Enemy Structures:" => block = Block::Structures,
            "> Snapshot Enemy Structures:" => block = Block::Snapshots,
            _ => match block {
                Block::Units => obs
                    .enemy_units
                    .push(parse_entity(line, text, SECTION, obs.map_size)?),
                Block::Structures => obs
                    .enemy_structures
                    .push(parse_entity(line, text, SECTION, obs.map_size)?),
                Block::Snapshots => {
                    let caps = SNAPSHOT
                        .captures(text)
                        .ok_or_else(|| malformed(line, SECTION, text))?;
                    obs.snapshot_enemy_structures.push(SnapshotEntity {
                        kind: caps[1].to_string(),
                        pos: parse_pos(&caps[2], &caps[3], line, obs.map_size)?,
                    });
                }
                Block::None => return Err(malformed(line, SECTION, text)),
            },
        }
    }
    Ok(())
}

fn parse_entity(
    line: usize,
    text: &str,
    section: &str,
    map_size: (u32, u32),
) -> Result<Entity, ParseError> {
    let caps = ENTITY
        .captures(text)
        .ok_or_else(|| malformed(line, section, text))?;
    Ok(Entity {
        kind: caps[1].to_string(),
        id: parse_num(&caps[2], line, section, text)?,
        pos: parse_pos(&caps[3], &caps[4], line, map_size)?,
        hp_pct: parse_num(&caps[5], line, section, text)?,
        energy_pct: match caps.get(6) {
            Some(m) => Some(parse_num(m.as_str(), line, section, text)?),
            None => None,
        },
        status: caps.get(7).map(|m| m.as_str().to_string()),
    })
}

fn is_empty_marker(body: &[(usize, &str)]) -> bool {
    body.is_empty() || (body.len() == 1 && body[0].1 == "[Empty]")
}

fn parse_num<T: std::str::FromStr>(
    digits: &str,
    line: usize,
    section: &str,
    content: &str,
) -> Result<T, ParseError> {
    digits
        .parse()
        .map_err(|_| malformed(line, section, content))
}

fn parse_pos(
    x: &str,
    y: &str,
    line: usize,
    map_size: (u32, u32),
) -> Result<(i32, i32), ParseError> {
    let (width, height) = map_size;
    let x: i32 = x.parse().map_err(|_| ParseError::OutOfBounds {
        line,
        x: i32::MAX,
        y: 0,
        width,
        height,
    })?;
    let y: i32 = y.parse().map_err(|_| ParseError::OutOfBounds {
        line,
        x,
        y: i32::MAX,
        width,
        height,
    })?;
    if x < 0 || y < 0 || x > width as i32 || y > height as i32 {
        return Err(ParseError::OutOfBounds {
            line,
            x,
            y,
            width,
            height,
        });
    }
    Ok((x, y))
}

fn parse_id_set(
    list: &str,
    line: usize,
    section: &str,
    content: &str,
) -> Result<BTreeSet<u32>, ParseError> {
    let mut set = BTreeSet::new();
    if list.is_empty() {
        return Ok(set);
    }
    for part in list.split(',') {
        let id: u32 = parse_num(part, line, section, content)?;
        if !set.insert(id) {
            return Err(malformed(line, section, content));
        }
    }
    Ok(set)
}
