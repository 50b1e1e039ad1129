//! Syntax mode: a keyword-indexed snippet database.
//!
//! File format, one record per keyword:
//!
//! ```text
//! == key
//! title: One-line heading
//! source: https://optional.example/
//! ---
//! body lines
//! ```
//!
//! Body lines beginning with `==` or `\` are stored with a leading `\`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::shell::{Leave, Mode, Session};

const STOCK: &str = include_str!("../../data/syntax_db.txt");

const ATTRIBUTION: &[&str] = &[
    "Examples are taken from",
    "1. https://juliabyexample.helpmanual.io/",
    "2. https://www.datacamp.com/cheat-sheet/julia-basics-cheat-sheet",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxEntry {
    pub key: String,
    pub title: String,
    pub body: Vec<String>,
    pub sources: Vec<String>,
}

impl SyntaxEntry {
    /// Lines shown when the key is typed.
    pub fn display(&self) -> Vec<String> {
        let mut out = vec![self.title.clone()];
        if !self.sources.is_empty() {
            out.push("More examples can be found here:".into());
            out.extend(self.sources.iter().cloned());
        }
        out.push("-----".into());
        out.extend(self.body.iter().cloned());
        out
    }
}

#[derive(Debug, Error)]
pub enum DbError {
    #[error("syntax database line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("record '{key}': {message}")]
    BadRecord { key: String, message: String },
    #[error("keyword '{0}' already exists")]
    Duplicate(String),
    #[error("keyword must be a single word")]
    BadKey,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Default)]
pub struct SyntaxDb {
    entries: Vec<SyntaxEntry>,
    path: Option<PathBuf>,
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches(':').to_lowercase()
}

impl SyntaxDb {
    /// The built-in database, not bound to a file.
    pub fn stock() -> Self {
        Self::parse(STOCK).expect("stock syntax database is well formed")
    }

    pub fn parse(text: &str) -> Result<Self, DbError> {
        let mut db = Self::default();
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r'))).peekable();
        while let Some((n, line)) = lines.next() {
            if line.trim().is_empty() {
                continue;
            }
            let Some(key) = line.strip_prefix("==") else {
                return Err(DbError::Malformed {
                    line: n,
                    message: "expected a '== key' record header".into(),
                });
            };
            let key = key.trim().to_string();
            let bad = |message: &str| DbError::BadRecord {
                key: key.clone(),
                message: message.into(),
            };
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(bad("keyword must be a single word"));
            }
            let mut title = None;
            let mut sources = Vec::new();
            let mut separated = false;
            for (_, line) in lines.by_ref() {
                if line == "---" {
                    separated = true;
                    break;
                }
                if let Some(t) = line.strip_prefix("title:") {
                    title = Some(t.trim().to_string());
                } else if let Some(s) = line.strip_prefix("source:") {
                    sources.push(s.trim().to_string());
                } else if !line.trim().is_empty() {
                    return Err(bad(&format!("unexpected header line '{line}'")));
                }
            }
            if !separated {
                return Err(bad("missing '---' separator"));
            }
            let title = title.ok_or_else(|| bad("missing title"))?;
            let mut body = Vec::new();
            while let Some((_, line)) = lines.next_if(|(_, l)| !l.starts_with("==")) {
                body.push(line.strip_prefix('\\').unwrap_or(line).to_string());
            }
            while body.last().is_some_and(|l| l.trim().is_empty()) {
                body.pop();
            }
            let entry = SyntaxEntry {
                key,
                title,
                body,
                sources,
            };
            if db.lookup(&entry.key).is_some() {
                return Err(DbError::Duplicate(entry.key));
            }
            db.entries.push(entry);
        }
        Ok(db)
    }

    pub fn load(path: &Path) -> Result<Self, DbError> {
        let mut db = Self::parse(&fs::read_to_string(path)?)?;
        db.path = Some(path.to_path_buf());
        Ok(db)
    }

    /// Loads `path` when it exists, otherwise the stock database bound to it.
    pub fn open_or_stock(path: &Path) -> Result<Self, DbError> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::stock().with_path(path))
        }
    }

    pub fn with_path(mut self, path: impl Into<PathBuf>) -> Self {
        self.path = Some(path.into());
        self
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("== {}\ntitle: {}\n", e.key, e.title));
            for s in &e.sources {
                out.push_str(&format!("source: {s}\n"));
            }
            out.push_str("---\n");
            for line in &e.body {
                if line.starts_with("==") || line.starts_with('\\') {
                    out.push('\\');
                }
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }

    pub fn entries(&self) -> &[SyntaxEntry] {
        &self.entries
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.key.as_str())
    }

    /// Case-insensitive; a leading `:` is ignored.
    pub fn lookup(&self, key: &str) -> Option<&SyntaxEntry> {
        let k = normalize(key);
        self.entries.iter().find(|e| e.key.to_lowercase() == k)
    }

    /// Adds `entry` and rewrites the bound file, if any. The database is
    /// unchanged when either step fails.
    pub fn add(&mut self, mut entry: SyntaxEntry) -> Result<(), DbError> {
        entry.key = entry.key.trim().trim_start_matches(':').to_string();
        if entry.key.is_empty() || entry.key.contains(char::is_whitespace) || entry.key.starts_with('=') {
            return Err(DbError::BadKey);
        }
        if self.lookup(&entry.key).is_some() {
            return Err(DbError::Duplicate(entry.key));
        }
        while entry.body.last().is_some_and(|l| l.trim().is_empty()) {
            entry.body.pop();
        }
        self.entries.push(entry);
        if let Some(path) = self.path.clone() {
            if let Err(e) = write_atomic(&path, &self.render()) {
                self.entries.pop();
                return Err(e.into());
            }
        }
        Ok(())
    }

    /// The `info` listing.
    pub fn info_lines(&self) -> Vec<String> {
        let mut out = vec!["info".to_string(), "-----".to_string()];
        out.extend(ATTRIBUTION.iter().map(|s| s.to_string()));
        out.extend(self.keys().map(|k| format!(":{k}")));
        out
    }
}

fn write_atomic(path: &Path, text: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Runs the `syntax>>` prompt until `back`, an interrupt or end of input.
pub fn syntax_loop(s: &mut Session<'_>) -> Result<(), Leave> {
    loop {
        let line = s.ask(Mode::Syntax.prompt())?;
        match line.trim() {
            "" => {}
            "back" => return Ok(()),
            "info" => {
                for l in s.syntax.info_lines() {
                    s.say(l);
                }
            }
            "add" => cmd_add(s)?,
            key => match s.syntax.lookup(key) {
                Some(entry) => {
                    for l in entry.display() {
                        s.say(l);
                    }
                }
                None => s.say(format!("Unknown keyword '{key}', type info for the list")),
            },
        }
    }
}

fn cmd_add(s: &mut Session<'_>) -> Result<(), Leave> {
    let key = s.question("Enter the new keyword")?.trim().to_string();
    if s.syntax.lookup(&key).is_some() {
        s.say(format!("Info: keyword '{key}' already exists"));
        return Ok(());
    }
    let title = s.question("Enter the title")?.trim().to_string();
    let source = s.question("Enter the reference link (RETURN for none)")?.trim().to_string();
    s.say("Enter the snippet. Type 'END' on a new line to finish:");
    let body = s.read_until_end("")?;
    let entry = SyntaxEntry {
        key: key.clone(),
        title,
        body,
        sources: if source.is_empty() { vec![] } else { vec![source] },
    };
    match s.syntax.add(entry) {
        Ok(()) => s.say(format!("Added :{key}")),
        Err(e) => s.say(format!("Error: {e}")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: [&str; 14] = [
        "print",
        "arithmetic",
        "parse",
        "formatting",
        "stringformatting",
        "errorhandling",
        "arrays",
        "dictionary",
        "variables",
        "for",
        "if",
        "while",
        "function",
        "mathematicalprogramming",
    ];

    #[test]
    fn stock_keys_in_order() {
        let db = SyntaxDb::stock();
        assert_eq!(db.keys().collect::<Vec<_>>(), KEYS);
        for line in db.info_lines().iter().skip(5) {
            assert!(db.lookup(line).is_some(), "{line}");
        }
    }

    #[test]
    fn math_entry() {
        let db = SyntaxDb::stock();
        let shown = db.lookup("MathematicalProgramming").unwrap().display();
        assert_eq!(shown[0], "Mathematical Optimization in Syntax");
        assert_eq!(shown[1], "More examples can be found here:");
        assert_eq!(shown[3], "-----");
        assert_eq!(shown[4], "using JuMP");
        assert_eq!(shown.last().unwrap(), "shadow_price(c2)");
        assert_eq!(shown.len(), 4 + 23);
    }

    #[test]
    fn round_trip() {
        let mut db = SyntaxDb::stock();
        db.add(SyntaxEntry {
            key: "tricky".into(),
            title: "t".into(),
            body: vec!["== not a header".into(), "\\backslash".into(), "".into(), "x".into()],
            sources: vec![],
        })
        .unwrap();
        let again = SyntaxDb::parse(&db.render()).unwrap();
        assert_eq!(again.entries(), db.entries());
        assert_eq!(again.render(), db.render());
    }

    #[test]
    fn add_and_reject_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("syntax_db.txt");
        let mut db = SyntaxDb::open_or_stock(&path).unwrap();
        let entry = SyntaxEntry {
            key: "mykey".into(),
            title: "Mine".into(),
            body: vec!["x = 1".into()],
            sources: vec![],
        };
        db.add(entry.clone()).unwrap();
        assert_eq!(db.lookup("mykey").unwrap().body, ["x = 1"]);
        let reloaded = SyntaxDb::load(&path).unwrap();
        assert_eq!(reloaded.lookup("mykey"), Some(&entry));
        let before = db.render();
        let dup = SyntaxEntry { key: "FOR".into(), ..entry };
        assert!(matches!(db.add(dup), Err(DbError::Duplicate(_))));
        assert_eq!(db.render(), before);
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(SyntaxDb::parse("stray\n"), Err(DbError::Malformed { line: 1, .. })));
        let err = SyntaxDb::parse("== a\ntitle: x\nbody\n").unwrap_err();
        assert!(err.to_string().contains("'a'"), "{err}");
        assert!(SyntaxDb::parse("== a\n---\n").is_err());
        assert!(matches!(
            SyntaxDb::parse("== a\ntitle: x\n---\n== a\ntitle: y\n---\n"),
            Err(DbError::Duplicate(_))
        ));
    }
}
