//! Execution mode: run files with logging, and a REPL over a persistent environment.

use std::fs::{self, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::thread;

use chrono::{DateTime, Local};

use crate::editor::with_jl_extension;
use crate::interp::{Environment, Interpreter, Observer, Value};
use crate::seqbuffer::{SequentialBuffer, DEFAULT_CAPACITY};
use crate::shell::{Io, Leave, Mode, Session};

pub const OUTPUT_LOG: &str = "mintej_output.log";
pub const ERROR_LOG: &str = "mintej_error.log";

const INFO: &[&str] = &[
    "e          :: Execution of julia file",
    "repl      :: REPL like session",
    "info      :: command information",
];

const WHOOPS: &str = "whoops - No file or Program runs an issue to execute";

/// One file execution.
#[derive(Debug, Clone)]
pub struct ExecRecord {
    pub source: PathBuf,
    pub output: Vec<String>,
    pub error: Option<String>,
    pub timestamp: DateTime<Local>,
}

impl ExecRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

/// Forwards each completed output line to a console.
pub(crate) struct Echo<'a>(pub &'a mut dyn Io);

impl Observer for Echo<'_> {
    fn printed(&mut self, line: &str) {
        self.0.print(line);
    }
}

struct EchoFn<'a>(&'a mut dyn FnMut(&str));

impl Observer for EchoFn<'_> {
    fn printed(&mut self, line: &str) {
        (self.0)(line);
    }
}

/// Runs `path` in a fresh interpreter, passing each output line to `echo`
/// as it is produced.
pub fn execute_file(path: &Path, interrupt: Arc<AtomicBool>, echo: &mut dyn FnMut(&str)) -> ExecRecord {
    let timestamp = Local::now();
    let source = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            return ExecRecord {
                source: path.to_path_buf(),
                output: Vec::new(),
                error: Some(format!("SystemError: opening file \"{}\": {e}", path.display())),
                timestamp,
            }
        }
    };
    let mut interp = Interpreter::with_interrupt(interrupt);
    let file = path.display().to_string();
    let result = interp.run_source(&source, &file, &mut EchoFn(echo));
    ExecRecord {
        source: path.to_path_buf(),
        output: interp.take_output(),
        error: result.err().map(|e| e.to_string()),
        timestamp,
    }
}

/// Runs `path` with an external interpreter binary. Stderr is drained on a
/// separate thread while stdout is echoed line by line.
pub fn execute_external(runtime: &Path, path: &Path, workdir: &Path, echo: &mut dyn FnMut(&str)) -> ExecRecord {
    let timestamp = Local::now();
    let record = |output, error| ExecRecord {
        source: path.to_path_buf(),
        output,
        error,
        timestamp,
    };
    let spawned = Command::new(runtime)
        .arg(path)
        .current_dir(workdir)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn();
    let mut child = match spawned {
        Ok(c) => c,
        Err(e) => return record(Vec::new(), Some(format!("cannot start {}: {e}", runtime.display()))),
    };
    let mut stderr = child.stderr.take().expect("piped stderr");
    let drain = thread::spawn(move || {
        let mut text = String::new();
        let _ = stderr.read_to_string(&mut text);
        text
    });
    let mut output = Vec::new();
    if let Some(stdout) = child.stdout.take() {
        for line in BufReader::new(stdout).lines() {
            let Ok(line) = line else { break };
            echo(&line);
            output.push(line);
        }
    }
    let status = child.wait();
    let err_text = drain.join().unwrap_or_default();
    let error = match status {
        Ok(st) if st.success() => None,
        Ok(st) => Some(if err_text.trim().is_empty() {
            format!("process exited with {st}")
        } else {
            err_text.trim_end().to_string()
        }),
        Err(e) => Some(e.to_string()),
    };
    record(output, error)
}

/// Appends the run's output block, and its error block if any, to the logs
/// in `dir`. Each block goes out in a single write.
pub fn append_logs(dir: &Path, record: &ExecRecord) -> io::Result<()> {
    let header = format!("=== {} {} ===\n", record.timestamp.format("%Y-%m-%d %H:%M:%S"), record.source.display());
    let mut out = header.clone();
    for line in &record.output {
        out.push_str(line);
        out.push('\n');
    }
    append(&dir.join(OUTPUT_LOG), &out)?;
    if let Some(err) = &record.error {
        append(&dir.join(ERROR_LOG), &format!("{header}{err}\n"))?;
    }
    Ok(())
}

fn append(path: &Path, block: &str) -> io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(block.as_bytes())
}

/// `name = value` for each watched name; unknown names are reported.
pub fn watch_report(env: &Environment, names: &[String]) -> Vec<String> {
    names
        .iter()
        .map(|n| match env.global(n) {
            Some(v) => format!("{n} = {}", v.repr()),
            None => format!("{n} is undefined"),
        })
        .collect()
}

/// Splits `x, y` or `:x :y` into names.
pub fn parse_names(text: &str) -> Vec<String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .map(|w| w.trim_start_matches(':'))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// Reads typed lines with `prompt` into a sequential buffer until `END` and
/// joins them. Lines past the buffer's capacity are dropped with a notice.
pub(crate) fn read_typed_program(s: &mut Session<'_>, prompt: &str) -> Result<(String, Vec<String>), Leave> {
    let mut buffer = SequentialBuffer::new(DEFAULT_CAPACITY).expect("nonzero capacity");
    let mut overflow = false;
    loop {
        let line = s.ask(prompt)?;
        if line.trim() == "END" {
            break;
        }
        if let Err(e) = buffer.write(line) {
            if !overflow {
                s.say(format!("Error: {e}, further lines are ignored"));
                overflow = true;
            }
        }
    }
    let lines = buffer.contents().to_vec();
    Ok((buffer.drain_joined(), lines))
}

/// Runs the `exe>>` prompt until `back`, an interrupt or end of input.
pub fn exe_loop(s: &mut Session<'_>) -> Result<(), Leave> {
    loop {
        let line = s.ask(Mode::Exe.prompt())?;
        match line.trim() {
            "" => {}
            "back" => return Ok(()),
            "info" => {
                for row in INFO {
                    s.say(row);
                }
            }
            "clear" => s.io.clear_screen(),
            "e" => cmd_execute(s)?,
            "repl" => repl_session(s)?,
            _ => s.say("Unknown command"),
        }
    }
}

fn cmd_execute(s: &mut Session<'_>) -> Result<(), Leave> {
    s.say(Mode::Exe.prompt());
    let name = s.question("Enter the file name to execute")?.trim().to_string();
    s.say("");
    let path = s.resolve(&with_jl_extension(&name));
    let workdir = s.workdir().to_path_buf();
    let io = &mut *s.io;
    let mut echo = |line: &str| io.print(line);
    let record = match s.external_runtime.clone() {
        Some(rt) => execute_external(&rt, &path, &workdir, &mut echo),
        None => execute_file(&path, Arc::clone(&s.interrupt), &mut echo),
    };
    if let Some(err) = &record.error {
        s.say(WHOOPS);
        s.say(format!("caught exception:{err}"));
    }
    if let Err(e) = append_logs(&workdir, &record) {
        s.say(format!("Error: cannot write log files: {e}"));
    }
    Ok(())
}

/// One REPL round: read a program, evaluate it in the persistent
/// environment, print its value, then offer the watch list.
pub fn repl_session(s: &mut Session<'_>) -> Result<(), Leave> {
    for l in ["", "Type jl to read file", "", "OR", "", "Hit return to work in REPL like session"] {
        s.say(l);
    }
    let choice = s.answer()?;
    let source = if choice.trim() == "jl" {
        let name = s.question("Enter the file name")?.trim().to_string();
        let path = s.resolve(&with_jl_extension(&name));
        match fs::read_to_string(&path) {
            Ok(text) => {
                let mut buffer = SequentialBuffer::new(DEFAULT_CAPACITY.max(text.lines().count() + 1)).expect("nonzero capacity");
                for line in text.lines() {
                    buffer.write(line).expect("sized to fit");
                }
                buffer.drain_joined()
            }
            Err(e) => {
                s.say(format!("Error: cannot read '{name}': {e}"));
                return Ok(());
            }
        }
    } else {
        s.say("Enter your code. Type 'END' on a new line to finish:");
        read_typed_program(s, Mode::Exe.prompt())?.0
    };
    let io = &mut *s.io;
    let result = s.repl.run_source(&source, "REPL", &mut Echo(io));
    s.repl.take_output();
    match result {
        Ok(v) => s.say(format!("Result: {}", v.repr())),
        Err(e) => s.say(format!("ERROR: {e}")),
    }
    let names = parse_names(&s.question("Info: Enter variable names to watch (e.g. x, y) or RETURN to continue")?);
    for l in watch_report(s.repl.env(), &names) {
        s.say(l);
    }
    Ok(())
}

/// Value of `name` in the REPL environment.
pub fn repl_value(s: &Session<'_>, name: &str) -> Option<Value> {
    s.repl.env().global(name).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_run_and_logs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.jl");
        fs::write(&path, "global x = 0\nwhile x <= 5\n    global x = x + 1\n    println(\"The number is:\",x)\nend\n\n").unwrap();
        let mut seen = Vec::new();
        let rec = execute_file(&path, Arc::default(), &mut |l| seen.push(l.to_string()));
        assert!(rec.succeeded());
        assert_eq!(seen, rec.output);
        assert_eq!(rec.output.len(), 6);
        append_logs(dir.path(), &rec).unwrap();
        append_logs(dir.path(), &rec).unwrap();
        let log = fs::read_to_string(dir.path().join(OUTPUT_LOG)).unwrap();
        assert_eq!(log.matches("===").count(), 4);
        assert!(log.ends_with("The number is:6\n"));
        assert!(!dir.path().join(ERROR_LOG).exists());
    }

    #[test]
    fn failures() {
        let dir = tempfile::tempdir().unwrap();
        let rec = execute_file(&dir.path().join("nope.jl"), Arc::default(), &mut |_| {});
        assert!(rec.error.unwrap().contains("SystemError"));
        let path = dir.path().join("bad.jl");
        fs::write(&path, "\nprintln(\"hello Julia Programming)\n").unwrap();
        let rec = execute_file(&path, Arc::default(), &mut |_| {});
        assert!(rec.error.as_deref().unwrap().contains("unterminated string literal"));
        append_logs(dir.path(), &rec).unwrap();
        let log = fs::read_to_string(dir.path().join(ERROR_LOG)).unwrap();
        assert!(log.contains("unterminated string literal"));
    }

    #[test]
    fn names_and_watch() {
        assert_eq!(parse_names("x, y"), ["x", "y"]);
        assert_eq!(parse_names(":x :y"), ["x", "y"]);
        assert!(parse_names("  ").is_empty());
        let mut env = Environment::new();
        env.set_global("x", Value::Int(6));
        env.set_global("s", Value::Str("hi".into()));
        let names = parse_names("x, s, q");
        assert_eq!(watch_report(&env, &names), ["x = 6", "s = \"hi\"", "q is undefined"]);
    }

    #[cfg(unix)]
    #[test]
    fn external_runtime_streams() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jl");
        fs::write(&path, "one\ntwo\n").unwrap();
        let rec = execute_external(Path::new("cat"), &path, dir.path(), &mut |_| {});
        assert!(rec.succeeded());
        assert_eq!(rec.output, ["one", "two"]);
        let rec = execute_external(Path::new("cat"), &dir.path().join("missing"), dir.path(), &mut |_| {});
        assert!(rec.error.is_some());
    }
}
