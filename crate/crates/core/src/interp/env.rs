use std::collections::{BTreeMap, HashSet};

use super::value::{Builtin, Value};

#[derive(Debug, Default, Clone)]
struct Frame {
    vars: BTreeMap<String, Value>,
    globals: HashSet<String>,
}

/// Global bindings plus the stack of local scopes that are currently open.
///
/// A function call swaps the whole local stack out, so a callee sees only
/// its own locals and the globals.
#[derive(Debug, Default, Clone)]
pub struct Environment {
    globals: BTreeMap<String, Value>,
    frames: Vec<Frame>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn at_top_level(&self) -> bool {
        self.frames.is_empty()
    }

    /// Innermost local, then globals, then the runtime's builtins and `nothing`.
    pub fn lookup(&self, name: &str) -> Option<Value> {
        for frame in self.frames.iter().rev() {
            if frame.globals.contains(name) {
                break;
            }
            if let Some(v) = frame.vars.get(name) {
                return Some(v.clone());
            }
        }
        if let Some(v) = self.globals.get(name) {
            return Some(v.clone());
        }
        if name == "nothing" {
            return Some(Value::Nothing);
        }
        Builtin::lookup(name).map(Value::Builtin)
    }

    pub fn global(&self, name: &str) -> Option<&Value> {
        self.globals.get(name)
    }

    pub fn set_global(&mut self, name: impl Into<String>, value: Value) {
        self.globals.insert(name.into(), value);
    }

    /// Binds `name` following the global/local rule: globals at top level or
    /// when declared `global` in an open scope, an existing local otherwise,
    /// else a fresh local in the innermost scope.
    pub fn assign(&mut self, name: &str, value: Value) {
        if self.frames.is_empty() || self.frames.iter().any(|f| f.globals.contains(name)) {
            self.globals.insert(name.to_string(), value);
            return;
        }
        if let Some(frame) = self.frames.iter_mut().rev().find(|f| f.vars.contains_key(name)) {
            frame.vars.insert(name.to_string(), value);
            return;
        }
        self.frames
            .last_mut()
            .expect("non-empty frame stack")
            .vars
            .insert(name.to_string(), value);
    }

    /// Creates a binding in the innermost scope regardless of outer ones.
    pub fn define_local(&mut self, name: &str, value: Value) {
        match self.frames.last_mut() {
            Some(frame) => {
                frame.vars.insert(name.to_string(), value);
            }
            None => {
                self.globals.insert(name.to_string(), value);
            }
        }
    }

    /// Marks `name` as global in the innermost scope. No effect at top level.
    pub fn declare_global(&mut self, name: &str) {
        if let Some(frame) = self.frames.last_mut() {
            frame.vars.remove(name);
            frame.globals.insert(name.to_string());
        }
    }

    pub fn push_scope<I>(&mut self, globals: I)
    where
        I: IntoIterator<Item = String>,
    {
        self.frames.push(Frame {
            vars: BTreeMap::new(),
            globals: globals.into_iter().collect(),
        });
    }

    pub fn pop_scope(&mut self) {
        self.frames.pop();
    }

    pub(crate) fn enter_call(&mut self) -> LocalStack {
        LocalStack(std::mem::take(&mut self.frames))
    }

    pub(crate) fn leave_call(&mut self, saved: LocalStack) {
        self.frames = saved.0;
    }

    pub(crate) fn reset_locals(&mut self) {
        self.frames.clear();
    }

    /// Every non-function binding visible from the current scope, locals
    /// shadowing globals, sorted by name.
    pub fn snapshot(&self) -> Vec<(String, Value)> {
        let mut visible: BTreeMap<&str, &Value> = BTreeMap::new();
        for (k, v) in &self.globals {
            visible.insert(k, v);
        }
        for frame in &self.frames {
            for name in &frame.globals {
                if let Some(v) = self.globals.get(name) {
                    visible.insert(name, v);
                }
            }
            for (k, v) in &frame.vars {
                visible.insert(k, v);
            }
        }
        visible
            .into_iter()
            .filter(|(_, v)| !v.is_callable())
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }
}

/// Local scopes parked while a function body runs.
#[derive(Debug)]
pub(crate) struct LocalStack(Vec<Frame>);
