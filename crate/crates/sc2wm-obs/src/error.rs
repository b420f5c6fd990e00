use thiserror::Error;

/// Structured parse failure. Every malformed input maps to exactly one of
/// these; the codec never panics on text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// A required section header is missing, duplicated, or out of order.
    #[error("line {line}: {detail}")]
    MalformedSection { line: usize, detail: String },

    /// A line inside a section matches no production of the grammar.
    #[error("line {line} [{section}]: unrecognized line: {content:?}")]
    MalformedLine {
        line: usize,
        section: String,
        content: String,
    },

    /// A coordinate lies outside the declared map bounds.
    #[error("line {line}: position ({x},{y}) outside declared {width}x{height} map")]
    OutOfBounds {
        line: usize,
        x: i32,
        y: i32,
        width: u32,
        height: u32,
    },
}

impl ParseError {
    /// Line number the error anchors to (1-based).
    pub fn line(&self) -> usize {
        match self {
            ParseError::MalformedSection { line, .. }
            | ParseError::MalformedLine { line, .. }
            | ParseError::OutOfBounds { line, .. } => *line,
        }
    }
}
