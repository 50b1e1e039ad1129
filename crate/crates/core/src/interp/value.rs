use std::fmt;
use std::rc::Rc;

use crate::minilang::{format_float, AstNode, Literal};

/// A user-defined function.
#[derive(Debug)]
pub struct Function {
    pub name: String,
    pub params: Vec<String>,
    pub body: AstNode,
}

/// Functions provided by the runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Println,
    Print,
    String,
    Abs,
    Sqrt,
    Div,
    Mod,
    Length,
}

impl Builtin {
    pub fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "println" => Self::Println,
            "print" => Self::Print,
            "string" => Self::String,
            "abs" => Self::Abs,
            "sqrt" => Self::Sqrt,
            "div" => Self::Div,
            "mod" => Self::Mod,
            "length" => Self::Length,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Println => "println",
            Self::Print => "print",
            Self::String => "string",
            Self::Abs => "abs",
            Self::Sqrt => "sqrt",
            Self::Div => "div",
            Self::Mod => "mod",
            Self::Length => "length",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    /// Inclusive integer range `lo:hi`.
    Range(i64, i64),
    Nothing,
    Function(Rc<Function>),
    Builtin(Builtin),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Self::Int(_) => "Int64",
            Self::Float(_) => "Float64",
            Self::Str(_) => "String",
            Self::Bool(_) => "Bool",
            Self::Range(..) => "UnitRange{Int64}",
            Self::Nothing => "Nothing",
            Self::Function(_) | Self::Builtin(_) => "Function",
        }
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Self::Function(_) | Self::Builtin(_))
    }

    /// Rendering used by `Result:` lines and watch reports: strings are quoted.
    pub fn repr(&self) -> String {
        match self {
            Self::Str(s) => Literal::Str(s.clone()).to_source(),
            other => other.to_string(),
        }
    }

    pub(crate) fn from_literal(lit: &Literal) -> Self {
        match lit {
            Literal::Int(v) => Self::Int(*v),
            Literal::Float(v) => Self::Float(*v),
            Literal::Str(s) => Self::Str(s.clone()),
            Literal::Bool(b) => Self::Bool(*b),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Int(a), Self::Int(b)) => a == b,
            (Self::Float(a), Self::Float(b)) => a == b || (a.is_nan() && b.is_nan()),
            (Self::Str(a), Self::Str(b)) => a == b,
            (Self::Bool(a), Self::Bool(b)) => a == b,
            (Self::Range(a, b), Self::Range(c, d)) => a == c && b == d,
            (Self::Nothing, Self::Nothing) => true,
            (Self::Function(a), Self::Function(b)) => Rc::ptr_eq(a, b),
            (Self::Builtin(a), Self::Builtin(b)) => a == b,
            _ => false,
        }
    }
}

/// Print-style rendering, as `println` shows it.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Int(v) => write!(f, "{v}"),
            Self::Float(v) => f.write_str(&format_float(*v)),
            Self::Str(s) => f.write_str(s),
            Self::Bool(b) => write!(f, "{b}"),
            Self::Range(lo, hi) => write!(f, "{lo}:{hi}"),
            Self::Nothing => f.write_str("nothing"),
            Self::Function(func) => write!(f, "{} (generic function with 1 method)", func.name),
            Self::Builtin(b) => f.write_str(b.name()),
        }
    }
}
