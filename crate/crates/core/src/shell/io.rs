use std::collections::VecDeque;
use std::io::{self, BufRead, Write};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

/// What a prompt produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Text(String),
    /// Keyboard interrupt.
    Interrupt,
    /// No more input will arrive.
    End,
}

/// Prompt/print handle pair every mode talks through.
pub trait Io {
    /// Shows `prompt` (possibly empty) and waits for one line.
    fn read_line(&mut self, prompt: &str) -> Input;

    fn print(&mut self, line: &str);

    fn clear_screen(&mut self) {
        self.print("\x1b[2J\x1b[H");
    }
}

/// Line that marks the point where a script ran out of input.
pub const EXHAUSTED: &str = "<<script exhausted>>";

/// Scripted input with a captured transcript.
///
/// Each prompt consumes the next script line; a line reading `^C` stands
/// for a keyboard interrupt. The transcript records prompt and answer on one
/// line, as a terminal would show them.
#[derive(Debug, Default)]
pub struct ScriptIo {
    input: VecDeque<String>,
    transcript: Vec<String>,
    exhausted: bool,
}

impl ScriptIo {
    pub fn new<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            input: lines.into_iter().map(Into::into).collect(),
            transcript: Vec::new(),
            exhausted: false,
        }
    }

    /// Splits a script text into lines. A trailing newline adds no line.
    pub fn from_text(text: &str) -> Self {
        Self::new(text.lines().map(|l| l.trim_end_matches('\r').to_string()))
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<String> {
        self.transcript
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }
}

impl Io for ScriptIo {
    fn read_line(&mut self, prompt: &str) -> Input {
        match self.input.pop_front() {
            Some(line) if line == "^C" => {
                self.transcript.push(format!("{prompt}^C"));
                Input::Interrupt
            }
            Some(line) => {
                self.transcript.push(format!("{prompt}{line}"));
                Input::Text(line)
            }
            None => {
                if !self.exhausted {
                    if !prompt.is_empty() {
                        self.transcript.push(prompt.to_string());
                    }
                    self.transcript.push(EXHAUSTED.to_string());
                    self.exhausted = true;
                }
                Input::End
            }
        }
    }

    fn print(&mut self, line: &str) {
        self.transcript.extend(line.split('\n').map(str::to_string));
    }

    fn clear_screen(&mut self) {}
}

/// Interactive terminal I/O. Lines come from a reader thread so a keyboard
/// interrupt can end a pending prompt.
pub struct ConsoleIo {
    lines: Receiver<Option<String>>,
    interrupt: Arc<AtomicBool>,
}

impl ConsoleIo {
    /// `interrupt` is set by the Ctrl-C handler and consumed by prompts.
    pub fn new(interrupt: Arc<AtomicBool>) -> Self {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let stdin = io::stdin();
            let mut lock = stdin.lock();
            loop {
                let mut line = String::new();
                match lock.read_line(&mut line) {
                    Ok(0) | Err(_) => {
                        let _ = tx.send(None);
                        break;
                    }
                    Ok(_) => {
                        let text = line.trim_end_matches(['\n', '\r']).to_string();
                        if tx.send(Some(text)).is_err() {
                            break;
                        }
                    }
                }
            }
        });
        Self { lines: rx, interrupt }
    }
}

impl Io for ConsoleIo {
    fn read_line(&mut self, prompt: &str) -> Input {
        let mut out = io::stdout().lock();
        let _ = write!(out, "{prompt}");
        let _ = out.flush();
        drop(out);
        self.interrupt.store(false, Ordering::SeqCst);
        loop {
            if self.interrupt.swap(false, Ordering::SeqCst) {
                println!();
                return Input::Interrupt;
            }
            match self.lines.recv_timeout(Duration::from_millis(50)) {
                Ok(Some(line)) => return Input::Text(line),
                Ok(None) | Err(RecvTimeoutError::Disconnected) => return Input::End,
                Err(RecvTimeoutError::Timeout) => {}
            }
        }
    }

    fn print(&mut self, line: &str) {
        println!("{line}");
    }

    fn clear_screen(&mut self) {
        print!("\x1b[2J\x1b[H");
        let _ = io::stdout().flush();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_records_prompts_and_exhaustion() {
        let mut io = ScriptIo::new(["a", "^C"]);
        assert_eq!(io.read_line("p>>"), Input::Text("a".into()));
        io.print("out");
        assert_eq!(io.read_line(""), Input::Interrupt);
        assert_eq!(io.read_line("p>>"), Input::End);
        assert_eq!(io.read_line("p>>"), Input::End);
        assert_eq!(io.transcript(), ["p>>a", "out", "^C", "p>>", EXHAUSTED]);
    }
}
