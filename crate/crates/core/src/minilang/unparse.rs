use super::ast::{AstNode, Head, Literal, Probe};

const INDENT: &str = "  ";

/// Renders a node back to source text.
///
/// Blocks print one statement per line with `#= file:N =#` marker comments,
/// which the lexer reads back, so `parse(unparse(ast)) == ast`.
pub fn unparse(node: &AstNode) -> String {
    match node {
        AstNode::Compound { head: Head::Block, .. } => block_lines(node, 0).join("\n"),
        _ => statement_lines(node, 0).join("\n"),
    }
}

fn pad(depth: usize) -> String {
    INDENT.repeat(depth)
}

fn block_lines(block: &AstNode, depth: usize) -> Vec<String> {
    let mut out = Vec::new();
    for arg in block.args() {
        out.extend(statement_lines(arg, depth));
    }
    out
}

fn statement_lines(node: &AstNode, depth: usize) -> Vec<String> {
    let p = pad(depth);
    match node {
        AstNode::LineMarker { line, file } => vec![format!("{p}#= {file}:{line} =#")],
        AstNode::Probe(Probe { body, .. }) => match body {
            Some(b) => statement_lines(b, depth),
            None => Vec::new(),
        },
        AstNode::Compound { head, args } => match head {
            Head::Block => block_lines(node, depth),
            Head::If => {
                let mut out = vec![format!("{p}if {}", expr(&args[0]))];
                if_tail(args, depth, &mut out);
                out.push(format!("{p}end"));
                out
            }
            Head::While => {
                let mut out = vec![format!("{p}while {}", expr(&args[0]))];
                out.extend(block_lines(&args[1], depth + 1));
                out.push(format!("{p}end"));
                out
            }
            Head::For => {
                let header = &args[0];
                let (var, iter) = (&header.args()[0], &header.args()[1]);
                let mut out = vec![format!("{p}for {} = {}", expr(var), expr(iter))];
                out.extend(block_lines(&args[1], depth + 1));
                out.push(format!("{p}end"));
                out
            }
            Head::Function => {
                let mut out = vec![format!("{p}function {}", expr(&args[0]))];
                out.extend(block_lines(&args[1], depth + 1));
                out.push(format!("{p}end"));
                out
            }
            _ => vec![format!("{p}{}", expr(node))],
        },
        _ => vec![format!("{p}{}", expr(node))],
    }
}

fn if_tail(args: &[AstNode], depth: usize, out: &mut Vec<String>) {
    let p = pad(depth);
    out.extend(block_lines(&args[1], depth + 1));
    if let Some(alt) = args.get(2) {
        if alt.head() == Some(Head::If) {
            out.push(format!("{p}elseif {}", expr(&alt.args()[0])));
            if_tail(alt.args(), depth, out);
        } else {
            out.push(format!("{p}else"));
            out.extend(block_lines(alt, depth + 1));
        }
    }
}

const ASSIGN: u8 = 1;
const COMPARISON: u8 = 2;
const RANGE: u8 = 3;
const ADDITIVE: u8 = 4;
const MULTIPLICATIVE: u8 = 5;
const UNARY: u8 = 6;
const ATOM: u8 = 7;

#[derive(Clone, Copy)]
enum Form<'a> {
    Binary(&'a str, u8),
    Unary(&'a str),
    Plain,
}

fn operator_form(node: &AstNode) -> Form<'_> {
    let AstNode::Compound { head: Head::Call, args } = node else {
        return Form::Plain;
    };
    let Some(AstNode::Identifier(op)) = args.first() else {
        return Form::Plain;
    };
    let arity = args.len() - 1;
    match (op.as_str(), arity) {
        ("+" | "*", n) if n >= 2 => Form::Binary(op, if op == "+" { ADDITIVE } else { MULTIPLICATIVE }),
        ("-", 2) => Form::Binary(op, ADDITIVE),
        ("/", 2) => Form::Binary(op, MULTIPLICATIVE),
        ("==" | "!=" | "<" | "<=" | ">" | ">=", 2) => Form::Binary(op, COMPARISON),
        ("-" | "+", 1) => Form::Unary(op),
        _ => Form::Plain,
    }
}

fn precedence(node: &AstNode) -> u8 {
    match node {
        AstNode::Compound { head: Head::Assign, .. } => ASSIGN,
        AstNode::Compound { head: Head::Range, .. } => RANGE,
        AstNode::Probe(Probe { body: Some(b), .. }) => precedence(b),
        _ => match operator_form(node) {
            Form::Binary(_, p) => p,
            Form::Unary(_) => UNARY,
            Form::Plain => ATOM,
        },
    }
}

fn paren(node: &AstNode, wrap: bool) -> String {
    if wrap {
        format!("({})", expr(node))
    } else {
        expr(node)
    }
}

/// Single-line rendering of an expression.
pub(crate) fn expr(node: &AstNode) -> String {
    match node {
        AstNode::Literal(lit) => lit.to_source(),
        AstNode::Identifier(name) => name.clone(),
        AstNode::LineMarker { line, file } => format!("#= {file}:{line} =#"),
        AstNode::Probe(Probe { body, .. }) => body.as_deref().map(expr).unwrap_or_default(),
        AstNode::Compound { head, args } => match head {
            Head::Assign => format!("{} = {}", expr(&args[0]), expr(&args[1])),
            Head::Global => {
                let names: Vec<String> = args.iter().map(expr).collect();
                format!("global {}", names.join(", "))
            }
            Head::Return => format!("return {}", expr(&args[0])),
            Head::Range => format!(
                "{}:{}",
                paren(&args[0], precedence(&args[0]) <= RANGE),
                paren(&args[1], precedence(&args[1]) <= RANGE)
            ),
            Head::Call => call(node, args),
            Head::Block | Head::If | Head::While | Head::For | Head::Function => {
                statement_lines(node, 0).join("; ")
            }
        },
    }
}

fn call(node: &AstNode, args: &[AstNode]) -> String {
    match operator_form(node) {
        Form::Binary(op, prec) => {
            let operands = &args[1..];
            let mut parts = Vec::with_capacity(operands.len());
            for (i, operand) in operands.iter().enumerate() {
                let p = precedence(operand);
                let wrap = if i == 0 {
                    p < prec || (p == prec && same_flattening_op(operand, op)) || prec == COMPARISON && p == prec
                } else {
                    p <= prec
                };
                parts.push(paren(operand, wrap));
            }
            parts.join(&format!(" {op} "))
        }
        Form::Unary(op) => {
            let operand = &args[1];
            let wrap = precedence(operand) < UNARY
                || matches!(operand, AstNode::Literal(Literal::Int(_) | Literal::Float(_)));
            format!("{op}{}", paren(operand, wrap))
        }
        Form::Plain => {
            let rendered: Vec<String> = args[1..].iter().map(expr).collect();
            format!("{}({})", expr(&args[0]), rendered.join(", "))
        }
    }
}

fn same_flattening_op(node: &AstNode, op: &str) -> bool {
    (op == "+" || op == "*")
        && matches!(operator_form(node), Form::Binary(inner, _) if inner == op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minilang::parse_program;

    #[test]
    fn assignment_round_trip_text() {
        let n = AstNode::compound(
            Head::Assign,
            vec![AstNode::ident("x"), AstNode::call("+", [AstNode::ident("x"), AstNode::int(1)])],
        );
        assert_eq!(unparse(&n), "x = x + 1");
        assert_eq!(unparse(&AstNode::int(0)), "0");
    }

    #[test]
    fn parenthesization() {
        let cases = [
            ("(a + b) + c", "(a + b) + c"),
            ("a + (b + c)", "a + (b + c)"),
            ("a - b - c", "a - b - c"),
            ("a - (b - c)", "a - (b - c)"),
            ("(a + b) * c", "(a + b) * c"),
            ("-(3)", "-(3)"),
            ("-3", "-3"),
            ("-(a + b)", "-(a + b)"),
            ("(1:3) == r", "1:3 == r"),
            ("1:(a < b)", "1:(a < b)"),
            ("(a < b) == c", "(a < b) == c"),
        ];
        for (src, want) in cases {
            let ast = parse_program(src, "t.jl").unwrap();
            let stmt = ast.statements().next().unwrap();
            assert_eq!(expr(stmt), want, "{src}");
        }
    }

    #[test]
    fn block_with_markers() {
        let ast = parse_program("for k = 1:2\nglobal x\nx = x + 1\nend", "/w/output_debug.jl").unwrap();
        let for_node = ast.statements().next().unwrap();
        assert_eq!(
            unparse(for_node),
            "for k = 1:2\n  #= /w/output_debug.jl:2 =#\n  global x\n  #= /w/output_debug.jl:3 =#\n  x = x + 1\nend"
        );
    }

    #[test]
    fn elseif_chain_text() {
        let src = "if a\n1\nelseif b\n2\nelse\n3\nend";
        let ast = parse_program(src, "t.jl").unwrap();
        let text = unparse(&ast);
        assert!(text.contains("elseif b"));
        assert_eq!(parse_program(&text, "t.jl").unwrap(), ast);
    }
}
