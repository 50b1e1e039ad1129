use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use crate::editor::EditorSession;
use crate::interp::Interpreter;
use crate::syntaxdb::SyntaxDb;

use super::io::{Input, Io};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Main,
    Edm,
    Fms,
    Exe,
    Db,
    Syntax,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::Main, Mode::Edm, Mode::Fms, Mode::Exe, Mode::Db, Mode::Syntax];

    pub fn prompt(self) -> &'static str {
        match self {
            Self::Main => "MinTEJ>>",
            Self::Edm => "edm>>",
            Self::Fms => "fms>>",
            Self::Exe => "exe>>",
            Self::Db => "db>>",
            Self::Syntax => "syntax>>",
        }
    }

    /// Mode entered by a main-prompt keyword.
    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "edm" => Self::Edm,
            "fms" => Self::Fms,
            "exe" => Self::Exe,
            "db" => Self::Db,
            "syntax" | "syntx" => Self::Syntax,
            _ => return None,
        })
    }
}

/// Why a prompt did not produce text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leave {
    Interrupt,
    End,
}

/// Controller state shared by every mode.
pub struct Session<'a> {
    pub io: &'a mut dyn Io,
    workdir: PathBuf,
    mode: Mode,
    transitions: Vec<(Mode, Mode)>,
    pub editor: EditorSession,
    /// Persistent environment for `repl`.
    pub repl: Interpreter,
    /// Debugger watch list.
    pub watch: Vec<String>,
    pub syntax: SyntaxDb,
    /// Interpreter binary that `e` delegates to instead of the built-in one.
    pub external_runtime: Option<PathBuf>,
    /// Command used by `cmdwin` instead of the platform default.
    pub terminal_command: Option<String>,
    pub interrupt: Arc<AtomicBool>,
}

impl<'a> Session<'a> {
    pub fn new(io: &'a mut dyn Io, workdir: impl AsRef<Path>) -> io::Result<Self> {
        let interrupt = Arc::new(AtomicBool::new(false));
        Ok(Self {
            io,
            workdir: workdir.as_ref().canonicalize()?,
            mode: Mode::Main,
            transitions: Vec::new(),
            editor: EditorSession::default(),
            repl: Interpreter::with_interrupt(Arc::clone(&interrupt)),
            watch: Vec::new(),
            syntax: SyntaxDb::stock(),
            external_runtime: None,
            terminal_command: None,
            interrupt,
        })
    }

    /// Shares `flag` with the prompts and the interpreters.
    pub fn with_interrupt(mut self, flag: Arc<AtomicBool>) -> Self {
        self.repl = Interpreter::with_interrupt(Arc::clone(&flag));
        self.interrupt = flag;
        self
    }

    pub fn workdir(&self) -> &Path {
        &self.workdir
    }

    pub fn set_workdir(&mut self, dir: PathBuf) {
        self.workdir = dir;
    }

    /// `name` as a path, relative names taken from the working directory.
    pub fn resolve(&self, name: &str) -> PathBuf {
        let p = Path::new(name);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.workdir.join(p)
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn transitions(&self) -> &[(Mode, Mode)] {
        &self.transitions
    }

    pub(crate) fn switch_mode(&mut self, to: Mode) {
        self.transitions.push((self.mode, to));
        self.mode = to;
    }

    pub fn say(&mut self, line: impl AsRef<str>) {
        self.io.print(line.as_ref());
    }

    pub fn ask(&mut self, prompt: &str) -> Result<String, Leave> {
        match self.io.read_line(prompt) {
            Input::Text(t) => Ok(t),
            Input::Interrupt => Err(Leave::Interrupt),
            Input::End => Err(Leave::End),
        }
    }

    /// Reads an answer on its own line, with no prompt text.
    pub fn answer(&mut self) -> Result<String, Leave> {
        self.ask("")
    }

    /// Prints `message`, then reads the answer on the next line.
    pub fn question(&mut self, message: &str) -> Result<String, Leave> {
        self.say(message);
        self.answer()
    }

    /// Reads lines with `prompt` until `END`.
    pub fn read_until_end(&mut self, prompt: &str) -> Result<Vec<String>, Leave> {
        let mut lines = Vec::new();
        loop {
            let line = self.ask(prompt)?;
            if line.trim() == "END" {
                return Ok(lines);
            }
            lines.push(line);
        }
    }
}
