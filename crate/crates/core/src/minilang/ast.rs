use std::fmt;

/// Expression kinds for compound nodes, named after the host language's
/// expression heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Head {
    Block,
    If,
    While,
    For,
    Function,
    Call,
    Assign,
    Global,
    Range,
    Return,
}

impl Head {
    pub fn name(self) -> &'static str {
        match self {
            Self::Block => "block",
            Self::If => "if",
            Self::While => "while",
            Self::For => "for",
            Self::Function => "function",
            Self::Call => "call",
            Self::Assign => "=",
            Self::Global => "global",
            Self::Range => "range",
            Self::Return => "return",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
}

/// Debugger instrumentation attached to the tree by the step and breakpoint
/// transforms. The parser never produces these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// Announce, evaluate and report a statement; `pause` asks for a watch list afterwards.
    Step { depth: u32, pause: bool },
    /// Announce a `for` loop and pause after each iteration.
    Loop { depth: u32 },
    /// Dump the scope and wait.
    Breakpoint { line: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub kind: ProbeKind,
    pub body: Option<Box<AstNode>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AstNode {
    Literal(Literal),
    Identifier(String),
    LineMarker { line: u32, file: String },
    Compound { head: Head, args: Vec<AstNode> },
    Probe(Probe),
}

impl AstNode {
    pub fn compound(head: Head, args: Vec<AstNode>) -> Self {
        Self::Compound { head, args }
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Self::Identifier(name.into())
    }

    pub fn int(v: i64) -> Self {
        Self::Literal(Literal::Int(v))
    }

    pub fn call(callee: &str, args: impl IntoIterator<Item = AstNode>) -> Self {
        let mut all = vec![Self::ident(callee)];
        all.extend(args);
        Self::compound(Head::Call, all)
    }

    pub fn head(&self) -> Option<Head> {
        match self {
            Self::Compound { head, .. } => Some(*head),
            _ => None,
        }
    }

    pub fn args(&self) -> &[AstNode] {
        match self {
            Self::Compound { args, .. } => args,
            _ => &[],
        }
    }

    pub fn is_marker(&self) -> bool {
        matches!(self, Self::LineMarker { .. })
    }

    /// Statements of a block, skipping line markers.
    pub fn statements(&self) -> impl Iterator<Item = &AstNode> {
        self.args().iter().filter(|a| !a.is_marker())
    }

    /// Removes every probe, keeping the nodes they wrap.
    pub fn erase_probes(&self) -> AstNode {
        match self {
            Self::Probe(Probe { body: Some(b), .. }) => b.erase_probes(),
            Self::Compound { head, args } => Self::Compound {
                head: *head,
                args: args
                    .iter()
                    .filter(|a| !matches!(a, Self::Probe(Probe { body: None, .. })))
                    .map(AstNode::erase_probes)
                    .collect(),
            },
            other => other.clone(),
        }
    }

    /// Renders the head/args shape as an s-expression.
    ///
    /// Line markers print as `(line N)`; the file is omitted.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out);
        out
    }

    fn write_sexpr(&self, out: &mut String) {
        match self {
            Self::Literal(lit) => out.push_str(&lit.to_source()),
            Self::Identifier(name) => out.push_str(name),
            Self::LineMarker { line, .. } => out.push_str(&format!("(line {line})")),
            Self::Compound { head, args } => {
                out.push('(');
                out.push_str(head.name());
                for a in args {
                    out.push(' ');
                    a.write_sexpr(out);
                }
                out.push(')');
            }
            Self::Probe(p) => {
                out.push_str("(probe");
                if let Some(b) = &p.body {
                    out.push(' ');
                    b.write_sexpr(out);
                }
                out.push(')');
            }
        }
    }
}

impl Literal {
    /// Source form that lexes back to the same literal.
    pub fn to_source(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) => format_float(*v),
            Self::Str(s) => {
                let mut out = String::with_capacity(s.len() + 2);
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        c => out.push(c),
                    }
                }
                out.push('"');
                out
            }
            Self::Bool(b) => b.to_string(),
        }
    }
}

/// Shortest round-trip float text, always with a decimal point (`1.0`, `1.0e20`).
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "Inf".into() } else { "-Inf".into() };
    }
    let s = format!("{v:?}");
    match s.split_once('e') {
        Some((mantissa, exp)) if !mantissa.contains('.') => format!("{mantissa}.0e{exp}"),
        _ => s,
    }
}

impl fmt::Display for AstNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::unparse(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text() {
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1e20), "1.0e20");
        assert_eq!(format_float(2.5e-7), "2.5e-7");
        assert_eq!(format_float(f64::INFINITY), "Inf");
    }

    #[test]
    fn erase_removes_bodyless_probes() {
        let block = AstNode::compound(
            Head::Block,
            vec![
                AstNode::Probe(Probe {
                    kind: ProbeKind::Breakpoint { line: 1 },
                    body: None,
                }),
                AstNode::Probe(Probe {
                    kind: ProbeKind::Step { depth: 2, pause: true },
                    body: Some(Box::new(AstNode::int(3))),
                }),
            ],
        );
        assert_eq!(block.erase_probes(), AstNode::compound(Head::Block, vec![AstNode::int(3)]));
    }

    #[test]
    fn sexpr_shape() {
        let n = AstNode::compound(
            Head::Assign,
            vec![AstNode::ident("x"), AstNode::call("+", [AstNode::ident("x"), AstNode::int(1)])],
        );
        assert_eq!(n.to_sexpr(), "(= x (call + x 1))");
    }
}
