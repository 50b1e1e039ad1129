//! MiniJL: lexer, recursive-descent parser and unparser for the embedded
//! Julia-like language.

pub mod ast;
pub mod lexer;
pub mod parser;
mod unparse;

use thiserror::Error;

pub use ast::{format_float, AstNode, Head, Literal, Probe, ProbeKind};
pub use lexer::{tokenize, Keyword, Op, Token, TokenKind};
pub use parser::{parse_program, parse_program_with_ends, BlockEnd, ParsedProgram};
pub use unparse::unparse;

/// Lexical or syntax error with its source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ParseError: Error @ {file}:{line}:{col} - {message}")]
pub struct SyntaxError {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub message: String,
}
