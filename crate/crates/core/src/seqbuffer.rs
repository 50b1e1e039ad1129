//! Sequential FIFO buffer and the line-buffer editing primitives.
//!
//! [`SequentialBuffer`] is the head/tail buffer that accumulates typed input
//! in the REPL and debugger. [`LineBuffer`] is the 1-indexed list of lines
//! that every editor command manipulates.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

/// Capacity used for interactive input sessions.
pub const DEFAULT_CAPACITY: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BufferError {
    #[error("buffer capacity must be at least 1")]
    InvalidCapacity,
    #[error("buffer is full (capacity {capacity})")]
    Full { capacity: usize },
    #[error("buffer is empty")]
    Empty,
}

/// Fixed-capacity buffer with monotone head and tail pointers.
///
/// Writes store at `tail` and advance it; reads take from `head` and advance
/// it. Pointers never wrap, so `0 <= head <= tail <= capacity` always holds
/// and the live contents are the cells `head..tail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialBuffer {
    cells: Vec<String>,
    capacity: usize,
    head: usize,
    tail: usize,
}

impl SequentialBuffer {
    pub fn new(capacity: usize) -> Result<Self, BufferError> {
        if capacity == 0 {
            return Err(BufferError::InvalidCapacity);
        }
        Ok(Self {
            cells: Vec::new(),
            capacity,
            head: 0,
            tail: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    /// Number of unread items, `tail - head`.
    pub fn len(&self) -> usize {
        self.tail - self.head
    }

    pub fn is_empty(&self) -> bool {
        self.head == self.tail
    }

    pub fn is_full(&self) -> bool {
        self.tail == self.capacity
    }

    pub fn write(&mut self, datum: impl Into<String>) -> Result<(), BufferError> {
        if self.is_full() {
            return Err(BufferError::Full {
                capacity: self.capacity,
            });
        }
        self.cells.push(datum.into());
        self.tail += 1;
        Ok(())
    }

    pub fn read(&mut self) -> Result<String, BufferError> {
        if self.is_empty() {
            return Err(BufferError::Empty);
        }
        let datum = std::mem::take(&mut self.cells[self.head]);
        self.head += 1;
        Ok(datum)
    }

    /// Live contents in FIFO order.
    pub fn contents(&self) -> &[String] {
        &self.cells[self.head..self.tail]
    }

    /// Reads every remaining item and joins them with `"\n"`.
    pub fn drain_joined(&mut self) -> String {
        let mut out = Vec::with_capacity(self.len());
        while let Ok(item) = self.read() {
            out.push(item);
        }
        out.join("\n")
    }
}

/// Inclusive, 1-based range of line numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineRange {
    start: usize,
    end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RangeError {
    #[error("invalid line range '{0}': expected N or A:B")]
    Malformed(String),
    #[error("invalid line range {start}:{end}: start is after end")]
    Reversed { start: usize, end: usize },
    #[error("line numbers start at 1")]
    Zero,
    #[error("line {line} is out of range (buffer has {len} lines)")]
    OutOfRange { line: usize, len: usize },
}

impl LineRange {
    pub fn new(start: usize, end: usize) -> Result<Self, RangeError> {
        if start == 0 || end == 0 {
            return Err(RangeError::Zero);
        }
        if start > end {
            return Err(RangeError::Reversed { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn single(line: usize) -> Result<Self, RangeError> {
        Self::new(line, line)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    /// Number of lines covered; never zero.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    fn check(&self, len: usize) -> Result<(), RangeError> {
        if self.end > len {
            return Err(RangeError::OutOfRange {
                line: self.end,
                len,
            });
        }
        Ok(())
    }
}

impl FromStr for LineRange {
    type Err = RangeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let parse = |part: &str| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| RangeError::Malformed(text.to_string()))
        };
        match text.split_once(':') {
            Some((a, b)) => Self::new(parse(a)?, parse(b)?),
            None => Self::single(parse(text)?),
        }
    }
}

impl fmt::Display for LineRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}", self.start, self.end)
        }
    }
}

/// The editable text of one file as terminator-free lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineBuffer {
    lines: Vec<String>,
    dirty: bool,
    origin: Option<PathBuf>,
}

impl LineBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_lines<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            lines: lines.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    /// Splits on `"\n"` or `"\r\n"`. A final terminator does not start a new line.
    pub fn load(text: &str) -> Self {
        let body = text.strip_suffix('\n').unwrap_or(text);
        if text.is_empty() {
            return Self::new();
        }
        let lines = body
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
            .collect();
        Self {
            lines,
            ..Self::default()
        }
    }

    /// Joins the lines, terminating each with `"\n"`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn mark_clean(&mut self) {
        self.dirty = false;
    }

    pub fn origin(&self) -> Option<&PathBuf> {
        self.origin.as_ref()
    }

    pub fn set_origin(&mut self, origin: Option<PathBuf>) {
        self.origin = origin;
    }

    /// Line `n` (1-based).
    pub fn line(&self, n: usize) -> Option<&str> {
        n.checked_sub(1)
            .and_then(|i| self.lines.get(i))
            .map(String::as_str)
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
        self.dirty = true;
    }

    fn check_position(&self, at: usize) -> Result<(), RangeError> {
        if at == 0 {
            return Err(RangeError::Zero);
        }
        if at > self.lines.len() + 1 {
            return Err(RangeError::OutOfRange {
                line: at,
                len: self.lines.len(),
            });
        }
        Ok(())
    }

    pub fn delete(&mut self, range: LineRange) -> Result<(), RangeError> {
        range.check(self.len())?;
        self.lines.drain(range.start - 1..range.end);
        self.dirty = true;
        Ok(())
    }

    /// Inserts copies of `src` so that the first copy lands at line `dest`.
    pub fn copy(&mut self, src: LineRange, dest: usize) -> Result<(), RangeError> {
        src.check(self.len())?;
        self.check_position(dest)?;
        let copies: Vec<String> = self.lines[src.start - 1..src.end].to_vec();
        self.lines.splice(dest - 1..dest - 1, copies);
        self.dirty = true;
        Ok(())
    }

    pub fn insert_blank(&mut self, at: usize) -> Result<(), RangeError> {
        self.check_position(at)?;
        self.lines.insert(at - 1, String::new());
        self.dirty = true;
        Ok(())
    }

    /// Prefixes `#`, or `# ` when the line is indented.
    pub fn comment(&mut self, range: LineRange) -> Result<(), RangeError> {
        range.check(self.len())?;
        for line in &mut self.lines[range.start - 1..range.end] {
            let prefix = if line.starts_with(char::is_whitespace) { "# " } else { "#" };
            line.insert_str(0, prefix);
        }
        self.dirty = true;
        Ok(())
    }

    /// Removes one `#` when it is the first non-whitespace character, along
    /// with the space `comment` put before an indented line.
    pub fn uncomment(&mut self, range: LineRange) -> Result<(), RangeError> {
        range.check(self.len())?;
        for line in &mut self.lines[range.start - 1..range.end] {
            let indent = line.len() - line.trim_start().len();
            if line[indent..].starts_with('#') {
                line.remove(indent);
                let rest = &line[indent..];
                if rest.starts_with(' ') && rest[1..].starts_with(char::is_whitespace) {
                    line.remove(indent);
                }
            }
        }
        self.dirty = true;
        Ok(())
    }

    /// `"N: text"` listing used by the editing commands (`"N:"` for blank lines).
    pub fn numbered(&self) -> Vec<String> {
        self.lines
            .iter()
            .enumerate()
            .map(|(i, l)| {
                if l.is_empty() {
                    format!("{}:", i + 1)
                } else {
                    format!("{}: {}", i + 1, l)
                }
            })
            .collect()
    }

    /// `"N:text"` listing used by the read commands.
    pub fn numbered_compact(&self, from: usize, to: usize) -> Vec<String> {
        (from..=to.min(self.len()))
            .filter_map(|n| self.line(n).map(|l| format!("{n}:{l}")))
            .collect()
    }
}
