//! The central controller: banner, main prompt, mode dispatch and scripted replay.

mod bench;
mod io;
mod session;

use std::path::Path;

pub use bench::{bench_sample, BenchError, BenchRow, MovingAverage};
pub use io::{ConsoleIo, Input, Io, ScriptIo, EXHAUSTED};
pub use session::{Leave, Mode, Session};

pub const BANNER: &[&str] = &[
    "+++++",
    "Welcome to Minimalistic Julia Terminal Editor Version 00",
    "+++++",
    "Enter in file management system >>fms",
    "Enter in Editor mode >>edm",
    "Enter in Execution mode >>exe",
    "Enter in debug mode >>db",
    "Enter in syntax mode >>syntax",
];

/// Keyword that ends the program from the main prompt.
pub const QUIT: &str = "exit";

/// Prints the banner and dispatches mode keywords until `exit`, an
/// interrupt at the main prompt, or end of input.
pub fn main_loop(s: &mut Session<'_>) {
    for line in BANNER {
        s.say(line);
    }
    loop {
        let Ok(line) = s.ask(Mode::Main.prompt()) else {
            return;
        };
        let word = line.trim();
        if word == QUIT {
            return;
        }
        if word.is_empty() {
            continue;
        }
        let Some(mode) = Mode::from_keyword(word) else {
            s.say("Unknown command");
            continue;
        };
        s.switch_mode(mode);
        let result = run_mode(s, mode);
        s.switch_mode(Mode::Main);
        if result == Err(Leave::End) {
            return;
        }
    }
}

fn run_mode(s: &mut Session<'_>, mode: Mode) -> Result<(), Leave> {
    match mode {
        Mode::Main => Ok(()),
        Mode::Edm => crate::editor::edm_loop(s),
        Mode::Fms => crate::fms::fms_loop(s),
        Mode::Exe => crate::exe::exe_loop(s),
        Mode::Db => crate::debugger::db_loop(s),
        Mode::Syntax => crate::syntaxdb::syntax_loop(s),
    }
}

/// Transcript and mode transitions of one scripted session.
#[derive(Debug, Clone)]
pub struct Replay {
    pub transcript: Vec<String>,
    pub transitions: Vec<(Mode, Mode)>,
}

/// Runs `script` against the main loop in `workdir`.
pub fn replay(script: &str, workdir: &Path) -> std::io::Result<Replay> {
    replay_with(script, workdir, |_| {})
}

/// Like [`replay`], with `configure` applied to the session first.
pub fn replay_with(script: &str, workdir: &Path, configure: impl FnOnce(&mut Session<'_>)) -> std::io::Result<Replay> {
    let mut io = ScriptIo::from_text(script);
    let transitions = {
        let mut session = Session::new(&mut io, workdir)?;
        configure(&mut session);
        main_loop(&mut session);
        session.transitions().to_vec()
    };
    Ok(Replay {
        transcript: io.into_transcript(),
        transitions,
    })
}

/// Replaces every occurrence of `workdir` with `<WORKDIR>`.
pub fn normalize_workdir(lines: &[String], workdir: &Path) -> Vec<String> {
    let dir = workdir.display().to_string();
    lines.iter().map(|l| l.replace(&dir, "<WORKDIR>")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_script_shows_banner_then_exhaustion() {
        let dir = tempfile::tempdir().unwrap();
        let r = replay("", dir.path()).unwrap();
        let mut want: Vec<String> = BANNER.iter().map(|s| s.to_string()).collect();
        want.push("MinTEJ>>".into());
        want.push(EXHAUSTED.into());
        assert_eq!(r.transcript, want);
        assert!(r.transitions.is_empty());
    }

    #[test]
    fn modes_return_to_main() {
        let dir = tempfile::tempdir().unwrap();
        let r = replay("bogus\nfms\nback\nsyntx\n^C\nexe\nback\nexit\n", dir.path()).unwrap();
        assert!(r.transcript.contains(&"Unknown command".to_string()));
        assert_eq!(
            r.transitions,
            [
                (Mode::Main, Mode::Fms),
                (Mode::Fms, Mode::Main),
                (Mode::Main, Mode::Syntax),
                (Mode::Syntax, Mode::Main),
                (Mode::Main, Mode::Exe),
                (Mode::Exe, Mode::Main),
            ]
        );
        assert_eq!(r.transcript.last().unwrap(), "MinTEJ>>exit");
    }

    #[test]
    fn workdir_placeholder() {
        let dir = tempfile::tempdir().unwrap();
        let wd = dir.path().canonicalize().unwrap();
        let r = replay("fms\nlc\n", &wd).unwrap();
        let norm = normalize_workdir(&r.transcript, &wd);
        assert!(norm.contains(&"<WORKDIR>".to_string()));
    }
}
