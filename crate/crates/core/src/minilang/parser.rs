use super::ast::{AstNode, Head, Literal};
use super::lexer::{tokenize_file, Keyword, Op, Token, TokenKind};
use super::SyntaxError;

/// Where a block's closing `end` sits in the source.
///
/// `path` addresses the closed block from the program root: each element is
/// an index into the `args` of the node reached so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEnd {
    pub line: u32,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProgram {
    pub ast: AstNode,
    pub block_ends: Vec<BlockEnd>,
}

pub fn parse_program(source: &str, file: &str) -> Result<AstNode, SyntaxError> {
    parse_program_with_ends(source, file).map(|p| p.ast)
}

pub fn parse_program_with_ends(source: &str, file: &str) -> Result<ParsedProgram, SyntaxError> {
    let tokens = tokenize_file(source, file)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        file: file.to_string(),
        pending_marker: None,
        block_ends: Vec::new(),
    };
    let ast = parser.block(&[], &[])?;
    parser.expect_end_of_input()?;
    Ok(ParsedProgram {
        ast,
        block_ends: parser.block_ends,
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    file: String,
    pending_marker: Option<(String, u32)>,
    block_ends: Vec<BlockEnd>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Assoc {
    /// `a + b + c` collects into one call.
    Flatten,
    Left,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn token(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&self, message: impl Into<String>) -> SyntaxError {
        let tok = self.token();
        SyntaxError {
            file: self.file.clone(),
            line: tok.line,
            col: tok.col,
            message: message.into(),
        }
    }

    fn at_op(&self, op: Op) -> bool {
        *self.peek() == TokenKind::Op(op)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        *self.peek() == TokenKind::Keyword(kw)
    }

    fn expect_op(&mut self, op: Op) -> Result<Token, SyntaxError> {
        if self.at_op(op) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("Expected `{}`, found {}", op.as_str(), self.peek())))
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<Token, SyntaxError> {
        if self.at_keyword(kw) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("Expected `{}`, found {}", kw.as_str(), self.peek())))
        }
    }

    fn expect_end_of_input(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            TokenKind::EndOfInput => Ok(()),
            other => Err(self.error_here(format!("unexpected {other}"))),
        }
    }

    /// Skips separators, remembering the last line marker seen.
    fn skip_separators(&mut self) {
        loop {
            match self.peek().clone() {
                TokenKind::Newline => {
                    self.advance();
                }
                TokenKind::Marker { file, line } => {
                    self.pending_marker = Some((file, line));
                    self.advance();
                }
                _ => break,
            }
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), TokenKind::Newline | TokenKind::Marker { .. }) {
            self.advance();
        }
    }

    fn block(&mut self, terminators: &[Keyword], path: &[usize]) -> Result<AstNode, SyntaxError> {
        let mut args = Vec::new();
        loop {
            self.skip_separators();
            match self.peek() {
                TokenKind::EndOfInput => break,
                TokenKind::Keyword(k) if terminators.contains(k) => break,
                TokenKind::Keyword(k @ (Keyword::End | Keyword::Else | Keyword::Elseif)) => {
                    return Err(self.error_here(format!("unexpected `{}`", k.as_str())));
                }
                _ => {}
            }
            let (file, line) = match self.pending_marker.take() {
                Some(m) => m,
                None => (self.file.clone(), self.token().line),
            };
            args.push(AstNode::LineMarker { line, file });
            let mut stmt_path = path.to_vec();
            stmt_path.push(args.len());
            let stmt = self.statement(&stmt_path)?;
            args.push(stmt);
            match self.peek() {
                TokenKind::Newline | TokenKind::Marker { .. } | TokenKind::EndOfInput => {}
                TokenKind::Keyword(k) if terminators.contains(k) => {}
                other => {
                    return Err(self.error_here(format!("Expected newline or `;`, found {other}")))
                }
            }
        }
        self.pending_marker = None;
        Ok(AstNode::compound(Head::Block, args))
    }

    fn close_block(&mut self, path: Vec<usize>) -> Result<(), SyntaxError> {
        let line = self.expect_keyword(Keyword::End)?.line;
        self.block_ends.push(BlockEnd { line, path });
        Ok(())
    }

    fn statement(&mut self, path: &[usize]) -> Result<AstNode, SyntaxError> {
        match self.peek() {
            TokenKind::Keyword(Keyword::Function) => self.function(path),
            TokenKind::Keyword(Keyword::For) => self.for_loop(path),
            TokenKind::Keyword(Keyword::While) => self.while_loop(path),
            TokenKind::Keyword(Keyword::If) => {
                self.advance();
                self.if_chain(path)
            }
            TokenKind::Keyword(Keyword::Global) => self.global(),
            TokenKind::Keyword(Keyword::Return) => {
                self.advance();
                let value = match self.peek() {
                    TokenKind::Newline | TokenKind::EndOfInput | TokenKind::Marker { .. } => {
                        AstNode::ident("nothing")
                    }
                    TokenKind::Keyword(Keyword::End | Keyword::Else | Keyword::Elseif) => {
                        AstNode::ident("nothing")
                    }
                    _ => self.expression()?,
                };
                Ok(AstNode::compound(Head::Return, vec![value]))
            }
            _ => self.expression(),
        }
    }

    fn child_path(path: &[usize], index: usize) -> Vec<usize> {
        let mut p = path.to_vec();
        p.push(index);
        p
    }

    fn function(&mut self, path: &[usize]) -> Result<AstNode, SyntaxError> {
        self.advance();
        let name = self.identifier("function name")?;
        self.expect_op(Op::LParen)?;
        let mut signature = vec![AstNode::ident(name)];
        self.skip_newlines();
        if !self.at_op(Op::RParen) {
            loop {
                self.skip_newlines();
                let param = self.identifier("parameter name")?;
                signature.push(AstNode::ident(param));
                self.skip_newlines();
                if self.at_op(Op::Comma) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect_op(Op::RParen)?;
        let body_path = Self::child_path(path, 1);
        let body = self.block(&[Keyword::End], &body_path)?;
        self.close_block(body_path)?;
        Ok(AstNode::compound(
            Head::Function,
            vec![AstNode::compound(Head::Call, signature), body],
        ))
    }

    fn identifier(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            TokenKind::Identifier(name) => {
                self.advance();
                Ok(name)
            }
            other => Err(self.error_here(format!("Expected {what}, found {other}"))),
        }
    }

    fn for_loop(&mut self, path: &[usize]) -> Result<AstNode, SyntaxError> {
        self.advance();
        let var = self.identifier("loop variable")?;
        if self.at_op(Op::Assign) || self.at_keyword(Keyword::In) {
            self.advance();
        } else {
            return Err(self.error_here(format!("Expected `=` or `in`, found {}", self.peek())));
        }
        let iter = self.comparison()?;
        let header = AstNode::compound(Head::Assign, vec![AstNode::ident(var), iter]);
        let body_path = Self::child_path(path, 1);
        let body = self.block(&[Keyword::End], &body_path)?;
        self.close_block(body_path)?;
        Ok(AstNode::compound(Head::For, vec![header, body]))
    }

    fn while_loop(&mut self, path: &[usize]) -> Result<AstNode, SyntaxError> {
        self.advance();
        let cond = self.comparison()?;
        let body_path = Self::child_path(path, 1);
        let body = self.block(&[Keyword::End], &body_path)?;
        self.close_block(body_path)?;
        Ok(AstNode::compound(Head::While, vec![cond, body]))
    }

    /// Parses after `if`/`elseif`. `elseif` becomes a nested `if` in the else slot,
    /// and the single closing `end` is attributed to the last block parsed.
    fn if_chain(&mut self, path: &[usize]) -> Result<AstNode, SyntaxError> {
        let cond = self.comparison()?;
        let then_path = Self::child_path(path, 1);
        let then_block = self.block(&[Keyword::End, Keyword::Else, Keyword::Elseif], &then_path)?;
        let mut args = vec![cond, then_block];
        match self.peek() {
            TokenKind::Keyword(Keyword::End) => self.close_block(then_path)?,
            TokenKind::Keyword(Keyword::Else) => {
                self.advance();
                let else_path = Self::child_path(path, 2);
                args.push(self.block(&[Keyword::End], &else_path)?);
                self.close_block(else_path)?;
            }
            TokenKind::Keyword(Keyword::Elseif) => {
                self.advance();
                args.push(self.if_chain(&Self::child_path(path, 2))?);
            }
            other => return Err(self.error_here(format!("Expected `end`, found {other}"))),
        }
        Ok(AstNode::compound(Head::If, args))
    }

    fn global(&mut self) -> Result<AstNode, SyntaxError> {
        self.advance();
        let first = self.identifier("variable name after `global`")?;
        if self.at_op(Op::Assign) {
            self.advance();
            let value = self.expression()?;
            return Ok(AstNode::compound(
                Head::Global,
                vec![AstNode::compound(Head::Assign, vec![AstNode::ident(first), value])],
            ));
        }
        let mut names = vec![AstNode::ident(first)];
        while self.at_op(Op::Comma) {
            self.advance();
            names.push(AstNode::ident(self.identifier("variable name")?));
        }
        Ok(AstNode::compound(Head::Global, names))
    }

    /// Assignment level: right-associative, target must be a name.
    fn expression(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.token().clone();
        let lhs = self.comparison()?;
        if self.at_op(Op::Assign) {
            if !matches!(lhs, AstNode::Identifier(_)) {
                return Err(SyntaxError {
                    file: self.file.clone(),
                    line: start.line,
                    col: start.col,
                    message: format!("invalid assignment location \"{}\"", super::unparse(&lhs)),
                });
            }
            self.advance();
            self.skip_newlines();
            let rhs = self.expression()?;
            return Ok(AstNode::compound(Head::Assign, vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> Result<AstNode, SyntaxError> {
        let lhs = self.colon_range()?;
        let Some(op) = self.comparison_op() else {
            return Ok(lhs);
        };
        self.advance();
        self.skip_newlines();
        let rhs = self.colon_range()?;
        if self.comparison_op().is_some() {
            return Err(self.error_here("chained comparisons are not supported"));
        }
        Ok(AstNode::call(op.as_str(), [lhs, rhs]))
    }

    fn comparison_op(&self) -> Option<Op> {
        match self.peek() {
            TokenKind::Op(op @ (Op::Eq | Op::NotEq | Op::Le | Op::Ge | Op::Lt | Op::Gt)) => Some(*op),
            _ => None,
        }
    }

    fn colon_range(&mut self) -> Result<AstNode, SyntaxError> {
        let lo = self.binary(&[Op::Plus, Op::Minus], Self::multiplicative)?;
        if !self.at_op(Op::Colon) {
            return Ok(lo);
        }
        self.advance();
        self.skip_newlines();
        let hi = self.binary(&[Op::Plus, Op::Minus], Self::multiplicative)?;
        if self.at_op(Op::Colon) {
            return Err(self.error_here("step ranges are not supported"));
        }
        Ok(AstNode::compound(Head::Range, vec![lo, hi]))
    }

    fn multiplicative(&mut self) -> Result<AstNode, SyntaxError> {
        self.binary(&[Op::Star, Op::Slash], Self::unary)
    }

    fn binary(
        &mut self,
        ops: &[Op],
        operand: fn(&mut Self) -> Result<AstNode, SyntaxError>,
    ) -> Result<AstNode, SyntaxError> {
        let mut lhs = operand(self)?;
        let mut last: Option<Op> = None;
        loop {
            let op = match self.peek() {
                TokenKind::Op(op) if ops.contains(op) => *op,
                _ => break,
            };
            self.advance();
            self.skip_newlines();
            let rhs = operand(self)?;
            let assoc = match op {
                Op::Plus | Op::Star => Assoc::Flatten,
                _ => Assoc::Left,
            };
            if assoc == Assoc::Flatten && last == Some(op) {
                if let AstNode::Compound { args, .. } = &mut lhs {
                    args.push(rhs);
                    continue;
                }
            }
            lhs = AstNode::call(op.as_str(), [lhs, rhs]);
            last = Some(op);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<AstNode, SyntaxError> {
        if self.at_op(Op::Minus) {
            self.advance();
            match self.peek().clone() {
                TokenKind::Integer(v) => {
                    self.advance();
                    return self.postfix(AstNode::Literal(Literal::Int(v.wrapping_neg())));
                }
                TokenKind::Float(v) => {
                    self.advance();
                    return self.postfix(AstNode::Literal(Literal::Float(-v)));
                }
                _ => {
                    let operand = self.unary()?;
                    return Ok(AstNode::call("-", [operand]));
                }
            }
        }
        if self.at_op(Op::Plus) {
            self.advance();
            let operand = self.unary()?;
            return Ok(AstNode::call("+", [operand]));
        }
        let primary = self.primary()?;
        self.postfix(primary)
    }

    fn postfix(&mut self, mut node: AstNode) -> Result<AstNode, SyntaxError> {
        while self.at_op(Op::LParen) {
            self.advance();
            let mut args = vec![node];
            self.skip_newlines();
            if !self.at_op(Op::RParen) {
                loop {
                    self.skip_newlines();
                    args.push(self.expression()?);
                    self.skip_newlines();
                    if self.at_op(Op::Comma) {
                        self.advance();
                    } else {
                        break;
                    }
                }
            }
            self.expect_op(Op::RParen)?;
            node = AstNode::compound(Head::Call, args);
        }
        Ok(node)
    }

    fn primary(&mut self) -> Result<AstNode, SyntaxError> {
        let tok = self.token().clone();
        let node = match tok.kind {
            TokenKind::Integer(v) => AstNode::Literal(Literal::Int(v)),
            TokenKind::Float(v) => AstNode::Literal(Literal::Float(v)),
            TokenKind::Str(s) => AstNode::Literal(Literal::Str(s)),
            TokenKind::Keyword(Keyword::True) => AstNode::Literal(Literal::Bool(true)),
            TokenKind::Keyword(Keyword::False) => AstNode::Literal(Literal::Bool(false)),
            TokenKind::Identifier(name) => AstNode::Identifier(name),
            TokenKind::Op(Op::LParen) => {
                self.advance();
                self.skip_newlines();
                let inner = self.expression()?;
                self.skip_newlines();
                self.expect_op(Op::RParen)?;
                return Ok(inner);
            }
            TokenKind::EndOfInput => {
                return Err(self.error_here("incomplete: premature end of input"));
            }
            other => return Err(self.error_here(format!("unexpected {other}"))),
        };
        self.advance();
        Ok(node)
    }
}
