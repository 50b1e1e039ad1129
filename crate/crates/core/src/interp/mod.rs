//! Tree-walking evaluator for MiniJL programs.

mod env;
mod eval;
mod value;

use thiserror::Error;

use crate::minilang::{parse_program, SyntaxError};

pub use env::Environment;
pub use eval::{Interpreter, Observer, Silent, MAX_CALL_DEPTH};
pub use value::{Builtin, Function, Value};

/// Returned by an observer to abandon the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Halt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} @ {file}:{line}")]
pub struct RuntimeError {
    pub message: String,
    pub file: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] SyntaxError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

impl RunError {
    pub fn line(&self) -> u32 {
        match self {
            Self::Parse(e) => e.line,
            Self::Runtime(e) => e.line,
        }
    }
}

/// Program output, one entry per completed line.
#[derive(Debug, Default, Clone)]
pub struct OutputSink {
    lines: Vec<String>,
    pending: String,
}

impl OutputSink {
    /// Completes the current line with `text` and returns it.
    pub fn println(&mut self, text: &str) -> String {
        let mut line = std::mem::take(&mut self.pending);
        line.push_str(text);
        self.lines.push(line.clone());
        line
    }

    pub fn print(&mut self, text: &str) {
        self.pending.push_str(text);
    }

    /// Turns unterminated `print` output into a line.
    pub fn flush(&mut self) -> Option<String> {
        if self.pending.is_empty() {
            return None;
        }
        Some(self.println(""))
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn take_lines(&mut self) -> Vec<String> {
        std::mem::take(&mut self.lines)
    }
}

/// Result of running a whole program in a fresh environment.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub value: Value,
    pub output: Vec<String>,
    pub error: Option<RunError>,
    pub env: Environment,
}

impl Interpreter {
    /// Parses and evaluates `source` in this interpreter's environment.
    pub fn run_source(&mut self, source: &str, file: &str, obs: &mut dyn Observer) -> Result<Value, RunError> {
        let ast = parse_program(source, file)?;
        Ok(self.eval_program(&ast, file, obs)?)
    }
}

/// Parses and evaluates `source` under a fresh environment. Errors are
/// returned in the outcome together with any output produced before them.
pub fn run_program(source: &str, file: &str) -> RunOutcome {
    run_program_with(source, file, &mut Silent)
}

pub fn run_program_with(source: &str, file: &str, obs: &mut dyn Observer) -> RunOutcome {
    let mut interp = Interpreter::new();
    let result = interp.run_source(source, file, obs);
    let output = interp.take_output();
    let env = interp.env().clone();
    match result {
        Ok(value) => RunOutcome {
            value,
            output,
            error: None,
            env,
        },
        Err(e) => RunOutcome {
            value: Value::Nothing,
            output,
            error: Some(e),
            env,
        },
    }
}
