use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

static ACTION: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^- \+(\d+)\.(\d)s: ([A-Za-z0-9_]+) \[(\d+)\] - ([A-Za-z0-9_]+)(?: - (.+))?$")
        .unwrap()
});
static POINT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\((\d+), (\d+)\)$").unwrap());
static UNIT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([A-Za-z0-9_]+) \[(\d+)\]$").unwrap());

/// Target of a command. Point targets render `(x, y)` with a space; entity
/// targets render `Kind [id]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    None,
    Point(i32, i32),
    Entity { kind: String, id: u32 },
}

/// One line of an action sequence: `Subject - Command - Target` with a
/// decisecond offset from the window start.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimedAction {
    /// Offset in tenths of a second (exact arithmetic; rendered `+T.Ds`).
    pub t_offset_ds: u32,
    pub subject_kind: String,
    pub subject_id: u32,
    pub command: String,
    pub target: Target,
}

impl TimedAction {
    pub fn offset_seconds(&self) -> f64 {
        self.t_offset_ds as f64 / 10.0
    }

    /// Index of the 1-second simulation substep this action falls in:
    /// offsets in (s, s+1] belong to substep s, and 0.0 to substep 0.
    pub fn substep(&self) -> u32 {
        if self.t_offset_ds == 0 {
            0
        } else {
            (self.t_offset_ds - 1) / 10
        }
    }

    /// Returns a copy shifted by whole seconds (used when rebasing per-record
    /// offsets onto a window).
    pub fn shifted_s(&self, seconds: u32) -> TimedAction {
        let mut out = self.clone();
        out.t_offset_ds += seconds * 10;
        out
    }
}

impl fmt::Display for TimedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "- +{}.{}s: {} [{}] - {}",
            self.t_offset_ds / 10,
            self.t_offset_ds % 10,
            self.subject_kind,
            self.subject_id,
            self.command
        )?;
        match &self.target {
            Target::None => Ok(()),
            Target::Point(x, y) => write!(f, " - ({x}, {y})"),
            Target::Entity { kind, id } => write!(f, " - {kind} [{id}]"),
        }
    }
}

/// Renders one canonical action line (no trailing newline).
pub fn serialize_action(action: &TimedAction) -> String {
    action.to_string()
}

/// Parses a single action line.
pub fn parse_action_line(text: &str, line_no: usize) -> Result<TimedAction, ParseError> {
    let malformed = || ParseError::MalformedLine {
        line: line_no,
        section: "action sequence".to_string(),
        content: text.to_string(),
    };
    let caps = ACTION.captures(text).ok_or_else(malformed)?;
    let whole: u32 = caps[1].parse().map_err(|_| malformed())?;
    let tenth: u32 = caps[2].parse().map_err(|_| malformed())?;
    let target = match caps.get(6) {
        None => Target::None,
        Some(m) => {
            let raw = m.as_str();
            if let Some(p) = POINT.captures(raw) {
                Target::Point(
                    p[1].parse().map_err(|_| malformed())?,
                    p[2].parse().map_err(|_| malformed())?,
                )
            } else if let Some(u) = UNIT.captures(raw) {
                Target::Entity {
                    kind: u[1].to_string(),
                    id: u[2].parse().map_err(|_| malformed())?,
                }
            } else {
                return Err(malformed());
            }
        }
    };
    Ok(TimedAction {
        t_offset_ds: whole * 10 + tenth,
        subject_kind: caps[3].to_string(),
        subject_id: caps[4].parse().map_err(|_| malformed())?,
        command: caps[5].to_string(),
        target,
    })
}

/// Parses a newline-separated action sequence, preserving input order.
/// Blank lines and a literal `(none)` marker are skipped.
pub fn parse_actions(text: &str) -> Result<Vec<TimedAction>, ParseError> {
    let mut out = Vec::new();
    for (idx, line) in text.split('\n').enumerate() {
        if line.is_empty() || line == "(none)" {
            continue;
        }
        out.push(parse_action_line(line, idx + 1)?);
    }
    Ok(out)
}
