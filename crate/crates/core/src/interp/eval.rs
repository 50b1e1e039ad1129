use std::cmp::Ordering;
use std::rc::Rc;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::minilang::{AstNode, Head, Probe, ProbeKind};

use super::env::Environment;
use super::value::{Builtin, Function, Value};
use super::{Halt, OutputSink, RuntimeError};

/// Nested user-function calls allowed before evaluation fails.
pub const MAX_CALL_DEPTH: usize = 10_000;

const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROWTH: usize = 4 * 1024 * 1024;

/// Callbacks fired while evaluating. Probe callbacks only fire for
/// instrumented trees.
pub trait Observer {
    /// A complete line of program output.
    fn printed(&mut self, _line: &str) {}

    fn before_step(&mut self, _depth: u32, _stmt: &AstNode, _env: &Environment) -> Result<(), Halt> {
        Ok(())
    }

    fn after_step(&mut self, _depth: u32, _pause: bool, _env: &Environment) -> Result<(), Halt> {
        Ok(())
    }

    fn enter_loop(&mut self, _depth: u32, _node: &AstNode, _env: &Environment) -> Result<(), Halt> {
        Ok(())
    }

    fn loop_iteration(&mut self, _depth: u32, _env: &Environment) -> Result<(), Halt> {
        Ok(())
    }

    fn breakpoint(&mut self, _line: u32, _env: &Environment) -> Result<(), Halt> {
        Ok(())
    }
}

/// Observer that ignores everything.
pub struct Silent;

impl Observer for Silent {}

enum Unwind {
    Return(Value),
    Error(RuntimeError),
}

impl From<RuntimeError> for Unwind {
    fn from(e: RuntimeError) -> Self {
        Self::Error(e)
    }
}

type Flow<T> = Result<T, Unwind>;

/// Tree-walking evaluator holding one environment across runs.
pub struct Interpreter {
    env: Environment,
    output: OutputSink,
    file: String,
    line: u32,
    calls: usize,
    interrupt: Arc<AtomicBool>,
}

impl Default for Interpreter {
    fn default() -> Self {
        Self::new()
    }
}

impl Interpreter {
    pub fn new() -> Self {
        Self::with_interrupt(Arc::new(AtomicBool::new(false)))
    }

    /// Evaluation stops with an `InterruptException` once `flag` is set.
    pub fn with_interrupt(flag: Arc<AtomicBool>) -> Self {
        Self {
            env: Environment::new(),
            output: OutputSink::default(),
            file: "none".into(),
            line: 1,
            calls: 0,
            interrupt: flag,
        }
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn env_mut(&mut self) -> &mut Environment {
        &mut self.env
    }

    pub fn output(&self) -> &OutputSink {
        &self.output
    }

    pub fn take_output(&mut self) -> Vec<String> {
        self.output.take_lines()
    }

    /// Evaluates a parsed program at top level and returns the value of its
    /// last statement. Partial output stays in the sink on error.
    pub fn eval_program(
        &mut self,
        program: &AstNode,
        file: &str,
        obs: &mut dyn Observer,
    ) -> Result<Value, RuntimeError> {
        self.file = file.to_string();
        self.line = 1;
        self.calls = 0;
        let result = self.eval(program, obs);
        if let Some(line) = self.output.flush() {
            obs.printed(&line);
        }
        self.env.reset_locals();
        match result {
            Ok(v) | Err(Unwind::Return(v)) => Ok(v),
            Err(Unwind::Error(e)) => Err(e),
        }
    }

    fn error(&self, message: impl Into<String>) -> RuntimeError {
        RuntimeError {
            message: message.into(),
            file: self.file.clone(),
            line: self.line,
        }
    }

    fn check_interrupt(&self) -> Result<(), RuntimeError> {
        if self.interrupt.swap(false, AtomicOrdering::SeqCst) {
            return Err(self.error("InterruptException"));
        }
        Ok(())
    }

    fn halted(&self, r: Result<(), Halt>) -> Result<(), RuntimeError> {
        r.map_err(|_| self.error("InterruptException"))
    }

    fn eval(&mut self, node: &AstNode, obs: &mut dyn Observer) -> Flow<Value> {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || self.eval_inner(node, obs))
    }

    fn eval_inner(&mut self, node: &AstNode, obs: &mut dyn Observer) -> Flow<Value> {
        match node {
            AstNode::Literal(lit) => Ok(Value::from_literal(lit)),
            AstNode::Identifier(name) => self
                .env
                .lookup(name)
                .ok_or_else(|| self.error(format!("UndefVarError: `{name}` not defined")).into()),
            AstNode::LineMarker { line, .. } => {
                self.line = *line;
                Ok(Value::Nothing)
            }
            AstNode::Probe(probe) => self.eval_probe(probe, obs),
            AstNode::Compound { head, args } => match head {
                Head::Block => self.eval_block(args, obs),
                Head::If => {
                    if self.condition(&args[0], obs)? {
                        self.eval(&args[1], obs)
                    } else if let Some(alt) = args.get(2) {
                        self.eval(alt, obs)
                    } else {
                        Ok(Value::Nothing)
                    }
                }
                Head::While => {
                    let globals = declared_globals(&args[1]);
                    loop {
                        self.check_interrupt()?;
                        if !self.condition(&args[0], obs)? {
                            break;
                        }
                        self.env.push_scope(globals.iter().cloned());
                        let r = self.eval(&args[1], obs);
                        self.env.pop_scope();
                        r?;
                    }
                    Ok(Value::Nothing)
                }
                Head::For => self.eval_for(args, None, obs),
                Head::Function => {
                    let sig = args[0].args();
                    let name = ident_name(&sig[0]).unwrap_or_default().to_string();
                    let params = sig[1..].iter().filter_map(ident_name).map(str::to_string).collect();
                    let func = Function {
                        name: name.clone(),
                        params,
                        body: args[1].clone(),
                    };
                    self.env.assign(&name, Value::Function(Rc::new(func)));
                    Ok(Value::Nothing)
                }
                Head::Call => self.eval_call(args, obs),
                Head::Assign => {
                    let value = self.eval(&args[1], obs)?;
                    let name = ident_name(&args[0]).ok_or_else(|| self.error("invalid assignment target"))?;
                    self.env.assign(name, value.clone());
                    Ok(value)
                }
                Head::Global => {
                    let mut last = Value::Nothing;
                    for arg in args {
                        match arg {
                            AstNode::Identifier(name) => self.env.declare_global(name),
                            AstNode::Compound { head: Head::Assign, args: pair } => {
                                let name = ident_name(&pair[0])
                                    .ok_or_else(|| self.error("invalid global declaration"))?;
                                self.env.declare_global(name);
                                last = self.eval(&pair[1], obs)?;
                                self.env.set_global(name, last.clone());
                            }
                            _ => return Err(self.error("invalid global declaration").into()),
                        }
                    }
                    Ok(last)
                }
                Head::Range => {
                    let lo = self.eval(&args[0], obs)?;
                    let hi = self.eval(&args[1], obs)?;
                    match (as_int(&lo), as_int(&hi)) {
                        (Some(a), Some(b)) => Ok(Value::Range(a, b)),
                        _ => Err(self
                            .error(format!(
                                "MethodError: no method matching (::Colon)(::{}, ::{})",
                                lo.type_name(),
                                hi.type_name()
                            ))
                            .into()),
                    }
                }
                Head::Return => {
                    let v = match args.first() {
                        Some(e) => self.eval(e, obs)?,
                        None => Value::Nothing,
                    };
                    Err(Unwind::Return(v))
                }
            },
        }
    }

    fn eval_block(&mut self, args: &[AstNode], obs: &mut dyn Observer) -> Flow<Value> {
        let mut last = Value::Nothing;
        for arg in args {
            let v = self.eval(arg, obs)?;
            if !is_transparent(arg) {
                last = v;
            }
        }
        Ok(last)
    }

    fn condition(&mut self, node: &AstNode, obs: &mut dyn Observer) -> Flow<bool> {
        match self.eval(node, obs)? {
            Value::Bool(b) => Ok(b),
            other => Err(self
                .error(format!(
                    "TypeError: non-boolean ({}) used in boolean context",
                    other.type_name()
                ))
                .into()),
        }
    }

    fn eval_for(&mut self, args: &[AstNode], probe_depth: Option<u32>, obs: &mut dyn Observer) -> Flow<Value> {
        let header = args[0].args();
        let var = ident_name(&header[0]).ok_or_else(|| self.error("invalid loop variable"))?;
        let (lo, hi) = match self.eval(&header[1], obs)? {
            Value::Range(lo, hi) => (lo, hi),
            other => {
                return Err(self
                    .error(format!("MethodError: no method matching iterate(::{})", other.type_name()))
                    .into())
            }
        };
        let globals = declared_globals(&args[1]);
        let mut k = lo;
        while k <= hi {
            self.check_interrupt()?;
            self.env.push_scope(globals.iter().cloned());
            self.env.define_local(var, Value::Int(k));
            let r = self.eval(&args[1], obs);
            let r = r.and_then(|_| match probe_depth {
                Some(d) => {
                    let hooked = obs.loop_iteration(d, &self.env);
                    Ok(self.halted(hooked)?)
                }
                None => Ok(()),
            });
            self.env.pop_scope();
            r?;
            if k == i64::MAX {
                break;
            }
            k += 1;
        }
        Ok(Value::Nothing)
    }

    fn eval_probe(&mut self, probe: &Probe, obs: &mut dyn Observer) -> Flow<Value> {
        match (probe.kind, probe.body.as_deref()) {
            (ProbeKind::Breakpoint { line }, _) => {
                let hooked = obs.breakpoint(line, &self.env);
                self.halted(hooked)?;
                Ok(Value::Nothing)
            }
            (ProbeKind::Loop { depth }, Some(body @ AstNode::Compound { head: Head::For, args })) => {
                let hooked = obs.enter_loop(depth, body, &self.env);
                self.halted(hooked)?;
                self.eval_for(args, Some(depth), obs)
            }
            (ProbeKind::Step { depth, pause }, Some(body)) => {
                let hooked = obs.before_step(depth, body, &self.env);
                self.halted(hooked)?;
                let v = self.eval(body, obs)?;
                let hooked = obs.after_step(depth, pause, &self.env);
                self.halted(hooked)?;
                Ok(v)
            }
            (_, Some(body)) => self.eval(body, obs),
            (_, None) => Ok(Value::Nothing),
        }
    }

    fn eval_call(&mut self, args: &[AstNode], obs: &mut dyn Observer) -> Flow<Value> {
        if let Some(op) = ident_name(&args[0]).filter(|n| is_operator(n)) {
            let mut vals = Vec::with_capacity(args.len() - 1);
            for a in &args[1..] {
                vals.push(self.eval(a, obs)?);
            }
            return Ok(self.apply_operator(op, &vals)?);
        }
        let callee = self.eval(&args[0], obs)?;
        let mut vals = Vec::with_capacity(args.len() - 1);
        for a in &args[1..] {
            vals.push(self.eval(a, obs)?);
        }
        match callee {
            Value::Builtin(b) => Ok(self.apply_builtin(b, &vals, obs)?),
            Value::Function(func) => self.call_function(&func, vals, obs),
            other => Err(self
                .error(format!(
                    "MethodError: objects of type {} are not callable",
                    other.type_name()
                ))
                .into()),
        }
    }

    fn call_function(&mut self, func: &Function, vals: Vec<Value>, obs: &mut dyn Observer) -> Flow<Value> {
        if vals.len() != func.params.len() {
            return Err(self.error(no_method(&func.name, &vals)).into());
        }
        if self.calls >= MAX_CALL_DEPTH {
            return Err(self
                .error(format!("StackOverflowError: call depth exceeded {MAX_CALL_DEPTH}"))
                .into());
        }
        self.check_interrupt()?;
        let saved = self.env.enter_call();
        self.env.push_scope(declared_globals(&func.body));
        for (p, v) in func.params.iter().zip(vals) {
            self.env.define_local(p, v);
        }
        let caller_line = self.line;
        self.calls += 1;
        let r = self.eval(&func.body, obs);
        self.calls -= 1;
        self.env.leave_call(saved);
        match r {
            Ok(v) | Err(Unwind::Return(v)) => {
                self.line = caller_line;
                Ok(v)
            }
            Err(e) => Err(e),
        }
    }

    fn apply_builtin(&mut self, b: Builtin, vals: &[Value], obs: &mut dyn Observer) -> Result<Value, RuntimeError> {
        let arity_error = || self.error(no_method(b.name(), vals));
        match b {
            Builtin::Println => {
                let text: String = vals.iter().map(ToString::to_string).collect();
                let line = self.output.println(&text);
                obs.printed(&line);
                Ok(Value::Nothing)
            }
            Builtin::Print => {
                let text: String = vals.iter().map(ToString::to_string).collect();
                self.output.print(&text);
                Ok(Value::Nothing)
            }
            Builtin::String => Ok(Value::Str(vals.iter().map(ToString::to_string).collect())),
            Builtin::Abs => match vals {
                [Value::Int(v)] => Ok(Value::Int(v.wrapping_abs())),
                [Value::Float(v)] => Ok(Value::Float(v.abs())),
                [Value::Bool(b)] => Ok(Value::Bool(*b)),
                _ => Err(arity_error()),
            },
            Builtin::Sqrt => match vals {
                [v] => {
                    let x = as_float(v).ok_or_else(arity_error)?;
                    if x < 0.0 {
                        return Err(self.error(format!(
                            "DomainError with {}: sqrt was called with a negative real argument",
                            v
                        )));
                    }
                    Ok(Value::Float(x.sqrt()))
                }
                _ => Err(arity_error()),
            },
            Builtin::Div | Builtin::Mod => match vals {
                [a, b_] => match (as_int(a), as_int(b_)) {
                    (Some(_), Some(0)) => Err(self.error("DivideError: integer division error")),
                    (Some(x), Some(y)) if b == Builtin::Div => Ok(Value::Int(x.wrapping_div(y))),
                    (Some(x), Some(y)) => Ok(Value::Int(x.wrapping_rem(y).wrapping_add(y).wrapping_rem(y))),
                    _ => Err(arity_error()),
                },
                _ => Err(arity_error()),
            },
            Builtin::Length => match vals {
                [Value::Str(s)] => Ok(Value::Int(s.chars().count() as i64)),
                [Value::Range(lo, hi)] => Ok(Value::Int(if hi < lo { 0 } else { hi.wrapping_sub(*lo).wrapping_add(1) })),
                _ => Err(arity_error()),
            },
        }
    }

    fn apply_operator(&self, op: &str, vals: &[Value]) -> Result<Value, RuntimeError> {
        let fail = || self.error(no_method(op, vals));
        match (op, vals) {
            ("+" | "-", [v]) => match v {
                Value::Int(x) => Ok(Value::Int(if op == "-" { x.wrapping_neg() } else { *x })),
                Value::Bool(b) => Ok(Value::Int(if op == "-" { -(*b as i64) } else { *b as i64 })),
                Value::Float(x) => Ok(Value::Float(if op == "-" { -x } else { *x })),
                _ => Err(fail()),
            },
            ("+" | "*", [first, rest @ ..]) if !rest.is_empty() => {
                let mut acc = first.clone();
                for v in rest {
                    acc = self.arith(op, &acc, v).ok_or_else(fail)?;
                }
                Ok(acc)
            }
            ("-" | "/", [a, b]) => self.arith(op, a, b).ok_or_else(fail),
            ("==", [a, b]) => Ok(Value::Bool(equal(a, b))),
            ("!=", [a, b]) => Ok(Value::Bool(!equal(a, b))),
            ("<" | "<=" | ">" | ">=", [a, b]) => {
                let ord = compare(a, b).ok_or_else(|| {
                    self.error(format!(
                        "MethodError: no method matching isless(::{}, ::{})",
                        a.type_name(),
                        b.type_name()
                    ))
                })?;
                let result = match ord {
                    None => false,
                    Some(o) => match op {
                        "<" => o == Ordering::Less,
                        "<=" => o != Ordering::Greater,
                        ">" => o == Ordering::Greater,
                        _ => o != Ordering::Less,
                    },
                };
                Ok(Value::Bool(result))
            }
            _ => Err(fail()),
        }
    }

    fn arith(&self, op: &str, a: &Value, b: &Value) -> Option<Value> {
        if let (Value::Str(x), Value::Str(y), "*") = (a, b, op) {
            return Some(Value::Str(format!("{x}{y}")));
        }
        if op == "/" {
            return Some(Value::Float(as_float(a)? / as_float(b)?));
        }
        match (as_int(a), as_int(b)) {
            (Some(x), Some(y)) if !matches!(a, Value::Float(_)) && !matches!(b, Value::Float(_)) => {
                Some(Value::Int(match op {
                    "+" => x.wrapping_add(y),
                    "-" => x.wrapping_sub(y),
                    _ => x.wrapping_mul(y),
                }))
            }
            _ => {
                let (x, y) = (as_float(a)?, as_float(b)?);
                Some(Value::Float(match op {
                    "+" => x + y,
                    "-" => x - y,
                    _ => x * y,
                }))
            }
        }
    }
}

fn ident_name(node: &AstNode) -> Option<&str> {
    match node {
        AstNode::Identifier(name) => Some(name),
        _ => None,
    }
}

fn is_operator(name: &str) -> bool {
    matches!(name, "+" | "-" | "*" | "/" | "==" | "!=" | "<" | "<=" | ">" | ">=")
}

/// Nodes that never count as a block's value.
fn is_transparent(node: &AstNode) -> bool {
    matches!(node, AstNode::LineMarker { .. } | AstNode::Probe(Probe { body: None, .. }))
}

fn as_int(v: &Value) -> Option<i64> {
    match v {
        Value::Int(x) => Some(*x),
        Value::Bool(b) => Some(*b as i64),
        _ => None,
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Int(x) => Some(*x as f64),
        Value::Bool(b) => Some(*b as i64 as f64),
        Value::Float(x) => Some(*x),
        _ => None,
    }
}

fn equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(_) | Value::Bool(_), Value::Int(_) | Value::Bool(_)) => as_int(a) == as_int(b),
        (Value::Float(_), _) | (_, Value::Float(_)) => match (as_float(a), as_float(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        },
        _ => a == b,
    }
}

/// `None` when the pair is not comparable, `Some(None)` for an unordered
/// float pair.
fn compare(a: &Value, b: &Value) -> Option<Option<Ordering>> {
    match (a, b) {
        (Value::Str(x), Value::Str(y)) => Some(Some(x.cmp(y))),
        (Value::Int(_) | Value::Bool(_), Value::Int(_) | Value::Bool(_)) => Some(as_int(a)?.partial_cmp(&as_int(b)?)),
        _ => Some(as_float(a)?.partial_cmp(&as_float(b)?)),
    }
}

fn no_method(name: &str, vals: &[Value]) -> String {
    let sig: Vec<String> = vals.iter().map(|v| format!("::{}", v.type_name())).collect();
    format!("MethodError: no method matching {name}({})", sig.join(", "))
}

/// Names declared `global` directly in `block`'s scope, i.e. not inside a
/// nested loop or function.
pub(crate) fn declared_globals(block: &AstNode) -> Vec<String> {
    fn walk(node: &AstNode, out: &mut Vec<String>) {
        match node {
            AstNode::Probe(Probe { body: Some(b), .. }) => walk(b, out),
            AstNode::Compound { head: Head::Global, args } => {
                for a in args {
                    let name = match a {
                        AstNode::Identifier(n) => Some(n),
                        AstNode::Compound { head: Head::Assign, args } => match &args[0] {
                            AstNode::Identifier(n) => Some(n),
                            _ => None,
                        },
                        _ => None,
                    };
                    if let Some(n) = name {
                        out.push(n.clone());
                    }
                }
            }
            AstNode::Compound { head: Head::Block | Head::If, args } => {
                for a in args {
                    walk(a, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(block, &mut out);
    out
}
