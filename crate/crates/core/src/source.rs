use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A line/column position in a source file (1-based).
///
/// Positions are carried on AST nodes for diagnostics and reports only:
/// every `SrcPos` compares equal to every other and hashes to nothing, so
/// structural equality of programs and agents never depends on layout.
#[derive(Clone, Copy, Debug, Default)]
pub struct SrcPos {
    pub line: u32,
    pub col: u32,
}

impl SrcPos {
    pub fn new(line: u32, col: u32) -> Self {
        SrcPos { line, col }
    }

    pub fn is_known(&self) -> bool {
        self.line > 0
    }
}

impl PartialEq for SrcPos {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for SrcPos {}

impl PartialOrd for SrcPos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SrcPos {
    fn cmp(&self, _other: &Self) -> Ordering {
        Ordering::Equal
    }
}

impl Hash for SrcPos {
    fn hash<H: Hasher>(&self, _state: &mut H) {}
}

impl fmt::Display for SrcPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
