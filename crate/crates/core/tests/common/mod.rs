//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::Path;

use mintej::debugger::{step_transform, Stepper};
use mintej::interp::{Interpreter, Silent, Value};
use mintej::minilang::{parse_program, AstNode, Head};
use mintej::shell::{self, Input, Io, Mode, Replay, Session};

const CORPUS: &str = include_str!("../fixtures/parser_corpus.txt");

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub source: String,
    pub expected: String,
}

/// Records of `fixtures/parser_corpus.txt`.
pub fn corpus() -> Vec<Fixture> {
    let mut out = Vec::new();
    let mut current: Option<(String, Vec<&str>)> = None;
    for line in CORPUS.lines() {
        if let Some(name) = line.strip_prefix("== ") {
            assert!(current.is_none(), "record before '{name}' has no expected shape");
            current = Some((name.trim().to_string(), Vec::new()));
        } else if let Some(expected) = line.strip_prefix("=> ") {
            let (name, src) = current.take().expect("shape line outside a record");
            out.push(Fixture {
                name,
                source: src.join("\n"),
                expected: expected.trim().to_string(),
            });
        } else if let Some((_, src)) = current.as_mut() {
            src.push(line);
        }
    }
    assert!(current.is_none(), "unterminated record at end of corpus");
    out
}

/// Renders a parsed program the way the host language prints a parsed
/// top-level expression after line numbers are removed.
pub fn julia_shape(program: &AstNode) -> String {
    let mut out = String::from("(toplevel");
    for stmt in program.statements() {
        out.push(' ');
        write_shape(stmt, &mut out);
    }
    out.push(')');
    out
}

fn write_shape(node: &AstNode, out: &mut String) {
    match node {
        AstNode::Compound { head: Head::If, args } => write_if(args, "if", out),
        AstNode::Compound { head: Head::Range, args } => {
            out.push_str("(call :");
            for a in args {
                out.push(' ');
                write_shape(a, out);
            }
            out.push(')');
        }
        AstNode::Compound { head, args } => {
            out.push('(');
            out.push_str(head.name());
            for a in args.iter().filter(|a| !a.is_marker()) {
                out.push(' ');
                write_shape(a, out);
            }
            out.push(')');
        }
        AstNode::Literal(lit) => out.push_str(&lit.to_source()),
        AstNode::Identifier(name) => out.push_str(name),
        AstNode::LineMarker { .. } | AstNode::Probe(_) => panic!("unexpected node in parser output: {node:?}"),
    }
}

fn write_if(args: &[AstNode], head: &str, out: &mut String) {
    out.push('(');
    out.push_str(head);
    out.push(' ');
    if head == "elseif" {
        out.push_str("(block ");
        write_shape(&args[0], out);
        out.push(')');
    } else {
        write_shape(&args[0], out);
    }
    out.push(' ');
    write_shape(&args[1], out);
    if let Some(alt) = args.get(2) {
        out.push(' ');
        match alt {
            AstNode::Compound { head: Head::If, args } => write_if(args, "elseif", out),
            other => write_shape(other, out),
        }
    }
    out.push(')');
}

/// Console that answers every prompt with RETURN and keeps what was printed.
#[derive(Debug, Default)]
pub struct AutoContinue {
    pub printed: Vec<String>,
    pub prompts: usize,
}

impl Io for AutoContinue {
    fn read_line(&mut self, _prompt: &str) -> Input {
        self.prompts += 1;
        Input::Text(String::new())
    }

    fn print(&mut self, line: &str) {
        self.printed.push(line.to_string());
    }
}

/// Final state of one run: output lines, error text and visible bindings.
#[derive(Debug, PartialEq)]
pub struct RunState {
    pub output: Vec<String>,
    pub error: Option<String>,
    pub bindings: Vec<(String, Value)>,
}

pub fn plain_run(source: &str) -> RunState {
    let ast = parse_program(source, "prog.jl").expect("fixture parses");
    let mut interp = Interpreter::new();
    let error = interp.eval_program(&ast, "prog.jl", &mut Silent).err().map(|e| e.to_string());
    RunState {
        output: interp.take_output(),
        error,
        bindings: interp.env().snapshot(),
    }
}

pub fn stepped_run(source: &str) -> RunState {
    let ast = parse_program(source, "prog.jl").expect("fixture parses");
    let instrumented = step_transform(&ast, 1);
    let mut interp = Interpreter::new();
    let mut io = AutoContinue::default();
    let mut watch = Vec::new();
    let mut stepper = Stepper {
        io: &mut io,
        watch: &mut watch,
        left: None,
    };
    let error = interp
        .eval_program(&instrumented, "prog.jl", &mut stepper)
        .err()
        .map(|e| e.to_string());
    assert!(stepper.left.is_none());
    RunState {
        output: interp.take_output(),
        error,
        bindings: interp.env().snapshot(),
    }
}

/// Replays `script` in `dir` with the transcript normalized to `<WORKDIR>`.
pub fn replay_in(dir: &Path, script: &str) -> Replay {
    let dir = dir.canonicalize().unwrap();
    let mut r = shell::replay_with(script, &dir, |s: &mut Session<'_>| {
        s.terminal_command = Some("true".into());
    })
    .unwrap();
    r.transcript = shell::normalize_workdir(&r.transcript, &dir);
    r
}

/// Transitions allowed by the mode graph: main to a mode and back.
pub fn allowed(from: Mode, to: Mode) -> bool {
    (from == Mode::Main) != (to == Mode::Main)
}

/// Start index of `needle` inside `hay` at or after `from`.
pub fn find_block(hay: &[String], needle: &[&str], from: usize) -> Option<usize> {
    if needle.is_empty() {
        return Some(from);
    }
    (from..hay.len().saturating_sub(needle.len() - 1)).find(|&i| hay[i..i + needle.len()].iter().zip(needle).all(|(a, b)| a == b))
}

pub fn text_lines(block: &str) -> Vec<&str> {
    block.lines().collect()
}
