//! Debug mode: AST stepping with watch lists, and breakpoints with scope dumps.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::editor::with_jl_extension;
use crate::exe::read_typed_program;
use crate::interp::{Environment, Halt, Interpreter, Observer, Value};
use crate::minilang::{parse_program_with_ends, unparse, AstNode, Head, ParsedProgram, Probe, ProbeKind};
use crate::shell::{Input, Io, Leave, Mode, Session};

/// File the debugged source is copied to before parsing.
pub const DEBUG_COPY: &str = "output_debug.jl";

pub const WATCH_PROMPT: &str = "Enter variable assignment (e.g., list_variables = [:x, :y]): ";

const INFO: &[&str] = &[
    "db          :: debug mode - step and break",
    "bp          :: Break point mode",
    "ibp         :: interactive break",
    "            :: file mode break",
    "stepin     :: Run the code step wise",
    "            :: Run file code step wise",
    "istepin    :: interactive step",
    "clear      :: clears the console",
];

/// An instrumented program and the file its line markers cite.
#[derive(Debug, Clone)]
pub struct StepPlan {
    pub instrumented: AstNode,
    pub source_file: PathBuf,
}

fn probe(kind: ProbeKind, body: AstNode) -> AstNode {
    AstNode::Probe(Probe {
        kind,
        body: Some(Box::new(body)),
    })
}

/// Instruments `node` for stepping. Statements in a block sit one level
/// deeper than the block; `for` bodies report without pausing, and the loop
/// pauses once per iteration instead.
pub fn step_transform(node: &AstNode, depth: u32) -> AstNode {
    transform(node, depth, false)
}

fn transform(node: &AstNode, depth: u32, in_for: bool) -> AstNode {
    let AstNode::Compound { head, args } = node else {
        return match node {
            AstNode::LineMarker { .. } | AstNode::Probe(_) => node.clone(),
            _ => probe(ProbeKind::Step { depth, pause: !in_for }, node.clone()),
        };
    };
    let cond = |c: &AstNode| probe(ProbeKind::Step { depth, pause: false }, c.clone());
    match head {
        Head::Block => AstNode::compound(Head::Block, args.iter().map(|a| transform(a, depth + 1, in_for)).collect()),
        Head::If => {
            let mut out = vec![cond(&args[0])];
            out.extend(args[1..].iter().map(|a| transform(a, depth, in_for)));
            AstNode::compound(Head::If, out)
        }
        Head::While => AstNode::compound(Head::While, vec![cond(&args[0]), transform(&args[1], depth, in_for)]),
        Head::For => {
            let body = transform(&args[1], depth + 1, true);
            probe(ProbeKind::Loop { depth }, AstNode::compound(Head::For, vec![args[0].clone(), body]))
        }
        Head::Function => AstNode::compound(Head::Function, vec![args[0].clone(), transform(&args[1], depth, in_for)]),
        _ => probe(ProbeKind::Step { depth, pause: !in_for }, node.clone()),
    }
}

fn node_at_mut<'a>(node: &'a mut AstNode, path: &[usize]) -> Option<&'a mut AstNode> {
    let mut cur = node;
    for &i in path {
        cur = match cur {
            AstNode::Compound { args, .. } => args.get_mut(i)?,
            _ => return None,
        };
    }
    Some(cur)
}

fn insert_after_marker(node: &mut AstNode, line: u32, bp: &AstNode) -> bool {
    let AstNode::Compound { head, args } = node else {
        return false;
    };
    if *head == Head::Block {
        if let Some(i) = args.iter().position(|a| matches!(a, AstNode::LineMarker { line: l, .. } if *l == line)) {
            args.insert(i + 1, bp.clone());
            return true;
        }
    }
    args.iter_mut().any(|a| insert_after_marker(a, line, bp))
}

/// Adds a breakpoint probe for source line `line`. A line holding a
/// statement breaks before that statement; a line holding a block's `end`
/// breaks after the block's last statement. `None` when neither applies.
pub fn insert_breakpoint(parsed: &ParsedProgram, line: u32) -> Option<AstNode> {
    let bp = AstNode::Probe(Probe {
        kind: ProbeKind::Breakpoint { line },
        body: None,
    });
    let mut ast = parsed.ast.clone();
    if insert_after_marker(&mut ast, line, &bp) {
        return Some(ast);
    }
    let end = parsed.block_ends.iter().find(|e| e.line == line)?;
    match node_at_mut(&mut ast, &end.path)? {
        AstNode::Compound { head: Head::Block, args } => {
            args.push(bp);
            Some(ast)
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WatchUpdate {
    Unchanged,
    Set(Vec<String>),
    Invalid,
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '!')
}

/// Reads `list_variables = [:a, :b]`. Empty input keeps the current list.
pub fn parse_watch_assignment(input: &str) -> WatchUpdate {
    let text = input.trim();
    if text.is_empty() {
        return WatchUpdate::Unchanged;
    }
    let parsed = (|| {
        let rest = text.strip_prefix("list_variables")?.trim_start().strip_prefix('=')?.trim();
        let inner = rest.strip_prefix('[')?.strip_suffix(']')?.trim();
        if inner.is_empty() {
            return Some(Vec::new());
        }
        inner
            .split(',')
            .map(|item| item.trim().strip_prefix(':').filter(|n| is_name(n)).map(str::to_string))
            .collect::<Option<Vec<_>>>()
    })();
    parsed.map_or(WatchUpdate::Invalid, WatchUpdate::Set)
}

/// `  name = value` lines for the watch list.
pub fn watch_lines(env: &Environment, names: &[String]) -> Vec<String> {
    names
        .iter()
        .map(|n| match env.lookup(n) {
            Some(Value::Builtin(_)) | None => format!("  {n} is undefined"),
            Some(v) => format!("  {n} = {}", v.repr()),
        })
        .collect()
}

/// Writes `source` to the debug copy in `dir`.
pub fn write_debug_copy(dir: &Path, source: &str) -> io::Result<PathBuf> {
    let path = dir.join(DEBUG_COPY);
    fs::write(&path, source)?;
    Ok(path)
}

/// Observer driving a stepped run through a console.
pub struct Stepper<'a> {
    pub io: &'a mut dyn Io,
    pub watch: &'a mut Vec<String>,
    pub left: Option<Leave>,
}

impl Stepper<'_> {
    fn print_watch(&mut self, env: &Environment) {
        for l in watch_lines(env, self.watch) {
            self.io.print(&l);
        }
    }

    fn pause(&mut self) -> Result<(), Halt> {
        loop {
            match self.io.read_line(WATCH_PROMPT) {
                Input::Text(t) => match parse_watch_assignment(&t) {
                    WatchUpdate::Unchanged => return Ok(()),
                    WatchUpdate::Set(names) => {
                        *self.watch = names;
                        return Ok(());
                    }
                    WatchUpdate::Invalid => self.io.print("Info: expected list_variables = [:x, :y] or RETURN"),
                },
                Input::Interrupt => return self.leave(Leave::Interrupt),
                Input::End => return self.leave(Leave::End),
            }
        }
    }

    fn leave(&mut self, why: Leave) -> Result<(), Halt> {
        self.left = Some(why);
        Err(Halt)
    }
}

impl Observer for Stepper<'_> {
    fn printed(&mut self, line: &str) {
        self.io.print(line);
    }

    fn before_step(&mut self, depth: u32, stmt: &AstNode, _env: &Environment) -> Result<(), Halt> {
        self.io.print(&format!("Line at {depth}: {}", unparse(stmt)));
        Ok(())
    }

    fn after_step(&mut self, _depth: u32, pause: bool, env: &Environment) -> Result<(), Halt> {
        self.print_watch(env);
        if pause {
            self.pause()?;
        }
        Ok(())
    }

    fn enter_loop(&mut self, depth: u32, node: &AstNode, _env: &Environment) -> Result<(), Halt> {
        self.io.print(&format!("Entering for loop at depth {depth}: {}", unparse(node)));
        Ok(())
    }

    fn loop_iteration(&mut self, _depth: u32, env: &Environment) -> Result<(), Halt> {
        self.pause()?;
        self.print_watch(env);
        Ok(())
    }
}

/// Observer that dumps the scope at each breakpoint and waits for RETURN.
pub struct BreakReporter<'a> {
    pub io: &'a mut dyn Io,
    pub hits: usize,
    pub left: Option<Leave>,
}

/// The lines printed when a breakpoint fires.
pub fn scope_dump(line: u32, env: &Environment) -> Vec<String> {
    let mut out = vec![format!("Breakpoint hit at line {line}"), "Variables in scope:".to_string()];
    out.extend(env.snapshot().into_iter().map(|(k, v)| format!("  {k} = {}", v.repr())));
    out
}

impl Observer for BreakReporter<'_> {
    fn printed(&mut self, line: &str) {
        self.io.print(line);
    }

    fn breakpoint(&mut self, line: u32, env: &Environment) -> Result<(), Halt> {
        self.hits += 1;
        for l in scope_dump(line, env) {
            self.io.print(&l);
        }
        match self.io.read_line("") {
            Input::Text(_) => Ok(()),
            Input::Interrupt => {
                self.left = Some(Leave::Interrupt);
                Err(Halt)
            }
            Input::End => {
                self.left = Some(Leave::End);
                Err(Halt)
            }
        }
    }
}

/// Writes the debug copy and parses it, citing the copy's absolute path.
fn prepare(s: &mut Session<'_>, source: &str) -> Option<ParsedProgram> {
    let path = match write_debug_copy(s.workdir(), source) {
        Ok(p) => p,
        Err(e) => {
            s.say(format!("Error: cannot write {DEBUG_COPY}: {e}"));
            return None;
        }
    };
    match parse_program_with_ends(source, &path.display().to_string()) {
        Ok(p) => Some(p),
        Err(e) => {
            s.say(format!("ERROR: {e}"));
            None
        }
    }
}

/// Runs `source` stepwise, pausing at each top-level statement and after
/// each loop iteration.
pub fn run_stepped(s: &mut Session<'_>, source: &str) -> Result<(), Leave> {
    let Some(parsed) = prepare(s, source) else {
        return Ok(());
    };
    let plan = StepPlan {
        instrumented: step_transform(&parsed.ast, 1),
        source_file: s.workdir().join(DEBUG_COPY),
    };
    let mut interp = Interpreter::with_interrupt(s.interrupt.clone());
    let mut stepper = Stepper {
        io: &mut *s.io,
        watch: &mut s.watch,
        left: None,
    };
    let result = interp.eval_program(&plan.instrumented, &plan.source_file.display().to_string(), &mut stepper);
    let left = stepper.left;
    finish(s, left, result.err().map(|e| e.to_string()))
}

fn finish(s: &mut Session<'_>, left: Option<Leave>, error: Option<String>) -> Result<(), Leave> {
    match left {
        Some(why) => Err(why),
        None => {
            if let Some(e) = error {
                s.say(format!("ERROR: {e}"));
            }
            Ok(())
        }
    }
}

/// Runs `source` with a breakpoint at `line`; without a matching line the
/// program runs plainly after a warning.
pub fn run_with_breakpoint(s: &mut Session<'_>, source: &str, line: u32) -> Result<(), Leave> {
    let Some(parsed) = prepare(s, source) else {
        return Ok(());
    };
    let program = match insert_breakpoint(&parsed, line) {
        Some(p) => p,
        None => {
            s.say(format!("Warning: no statement at line {line}, running without a breakpoint"));
            parsed.ast
        }
    };
    let file = s.workdir().join(DEBUG_COPY).display().to_string();
    let mut interp = Interpreter::with_interrupt(s.interrupt.clone());
    let mut reporter = BreakReporter {
        io: &mut *s.io,
        hits: 0,
        left: None,
    };
    let result = interp.eval_program(&program, &file, &mut reporter);
    let left = reporter.left;
    finish(s, left, result.err().map(|e| e.to_string()))
}

/// Runs the `db>>` prompt until `back`, an interrupt or end of input.
pub fn db_loop(s: &mut Session<'_>) -> Result<(), Leave> {
    loop {
        let line = s.ask(Mode::Db.prompt())?;
        match line.trim() {
            "" => {}
            "back" => return Ok(()),
            "info" => {
                for row in INFO {
                    s.say(row);
                }
            }
            "clear" => s.io.clear_screen(),
            "bp" => {
                s.say("Type ibp for interactive breakpoint");
                let choice = s.question("Hit RETURN for adding breakpoint in julia file")?;
                match choice.trim() {
                    "ibp" => interactive(s, false)?,
                    "" => from_file(s, false)?,
                    _ => s.say("Info: type ibp or hit RETURN"),
                }
            }
            "stepin" => {
                s.say("Type istepin for interactive stepping");
                let choice = s.question("Hit RETURN for adding interactive stepping in julia file")?;
                match choice.trim() {
                    "istepin" => interactive(s, true)?,
                    "" => from_file(s, true)?,
                    _ => s.say("Info: type istepin or hit RETURN"),
                }
            }
            "ibp" => interactive(s, false)?,
            "istepin" => interactive(s, true)?,
            _ => s.say("Unknown command"),
        }
    }
}

fn interactive(s: &mut Session<'_>, step: bool) -> Result<(), Leave> {
    let (source, lines) = read_typed_program(s, Mode::Db.prompt())?;
    for (i, l) in lines.iter().enumerate() {
        s.say(format!("{}: {l}", i + 1));
    }
    debug_source(s, &source, step)
}

fn from_file(s: &mut Session<'_>, step: bool) -> Result<(), Leave> {
    let name = s.question("Enter the file name")?.trim().to_string();
    let path = s.resolve(&with_jl_extension(&name));
    match fs::read_to_string(&path) {
        Ok(source) => debug_source(s, &source, step),
        Err(e) => {
            s.say(format!("Error: cannot read '{name}': {e}"));
            Ok(())
        }
    }
}

fn debug_source(s: &mut Session<'_>, source: &str, step: bool) -> Result<(), Leave> {
    if step {
        return run_stepped(s, source);
    }
    loop {
        let text = s.question("Add the break point")?;
        let text = text.trim();
        if text.is_empty() {
            s.say("Info: cancelled");
            return Ok(());
        }
        match text.parse::<u32>() {
            Ok(line) if line >= 1 => return run_with_breakpoint(s, source, line),
            _ => s.say("Error: enter a line number"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::Silent;
    use crate::minilang::parse_program;
    use crate::shell::ScriptIo;

    const MI_FUNCTION: &str = "function mi()\nx = 0\nfor k = 1:3\nx = x+1\nend\nend\nmi()";
    const COUNT_LOOP: &str = "global x = 0\nfor k = 1:2\nglobal x\nx = x + 1\nend";

    #[test]
    fn watch_grammar() {
        assert_eq!(parse_watch_assignment(""), WatchUpdate::Unchanged);
        assert_eq!(parse_watch_assignment("list_variables = [:x]"), WatchUpdate::Set(vec!["x".into()]));
        assert_eq!(
            parse_watch_assignment("list_variables=[ :x , :y ]"),
            WatchUpdate::Set(vec!["x".into(), "y".into()])
        );
        assert_eq!(parse_watch_assignment("list_variables = []"), WatchUpdate::Set(vec![]));
        assert_eq!(parse_watch_assignment("x"), WatchUpdate::Invalid);
        assert_eq!(parse_watch_assignment("list_variables = [x]"), WatchUpdate::Invalid);
    }

    #[test]
    fn transform_erases_to_original() {
        for src in [MI_FUNCTION, COUNT_LOOP, "x = 1\nif x < 2\ny = 1\nelseif x < 3\ny = 2\nelse\ny = 3\nend\nwhile x < 3\nx = x + 1\nend"] {
            let ast = parse_program(src, "t.jl").unwrap();
            assert_eq!(step_transform(&ast, 1).erase_probes(), ast);
        }
    }

    #[test]
    fn breakpoint_on_block_end_fires_per_iteration() {
        let parsed = parse_program_with_ends(MI_FUNCTION, "t.jl").unwrap();
        let program = insert_breakpoint(&parsed, 5).unwrap();
        struct Count(Vec<Vec<(String, Value)>>);
        impl Observer for Count {
            fn breakpoint(&mut self, _line: u32, env: &Environment) -> Result<(), Halt> {
                self.0.push(env.snapshot());
                Ok(())
            }
        }
        let mut c = Count(Vec::new());
        Interpreter::new().eval_program(&program, "t.jl", &mut c).unwrap();
        assert_eq!(c.0.len(), 3);
        for (i, snap) in c.0.iter().enumerate() {
            let n = i as i64 + 1;
            assert_eq!(snap, &[("k".to_string(), Value::Int(n)), ("x".to_string(), Value::Int(n))]);
        }
        assert!(insert_breakpoint(&parsed, 99).is_none());
        assert_eq!(insert_breakpoint(&parsed, 4).unwrap().erase_probes(), parsed.ast);
    }

    #[test]
    fn stepped_trace() {
        let ast = parse_program(COUNT_LOOP, "d.jl").unwrap();
        let mut io = ScriptIo::new(["list_variables = [:x]", "", ""]);
        let mut watch = Vec::new();
        let mut st = Stepper {
            io: &mut io,
            watch: &mut watch,
            left: None,
        };
        Interpreter::new().eval_program(&step_transform(&ast, 1), "d.jl", &mut st).unwrap();
        let xs: Vec<&String> = io.transcript().iter().filter(|l| l.strip_prefix("  x = ").is_some_and(|v| v.parse::<i64>().is_ok())).collect();
        assert_eq!(xs, ["  x = 0", "  x = 1", "  x = 1", "  x = 1", "  x = 2", "  x = 2"]);
        assert_eq!(io.transcript()[0], "Line at 2: global x = 0");
        let plain = {
            let mut i = Interpreter::new();
            i.eval_program(&ast, "d.jl", &mut Silent).unwrap();
            i.env().snapshot()
        };
        assert_eq!(plain, [("x".to_string(), Value::Int(2))]);
    }
}
