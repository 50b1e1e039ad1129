use std::fmt;

use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Function,
    For,
    While,
    If,
    Elseif,
    Else,
    End,
    Global,
    Return,
    In,
    True,
    False,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Self> {
        Some(match word {
            "function" => Self::Function,
            "for" => Self::For,
            "while" => Self::While,
            "if" => Self::If,
            "elseif" => Self::Elseif,
            "else" => Self::Else,
            "end" => Self::End,
            "global" => Self::Global,
            "return" => Self::Return,
            "in" => Self::In,
            "true" => Self::True,
            "false" => Self::False,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Function => "function",
            Self::For => "for",
            Self::While => "while",
            Self::If => "if",
            Self::Elseif => "elseif",
            Self::Else => "else",
            Self::End => "end",
            Self::Global => "global",
            Self::Return => "return",
            Self::In => "in",
            Self::True => "true",
            Self::False => "false",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Plus,
    Minus,
    Star,
    Slash,
    Assign,
    Eq,
    NotEq,
    Le,
    Ge,
    Lt,
    Gt,
    Colon,
    LParen,
    RParen,
    Comma,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Plus => "+",
            Self::Minus => "-",
            Self::Star => "*",
            Self::Slash => "/",
            Self::Assign => "=",
            Self::Eq => "==",
            Self::NotEq => "!=",
            Self::Le => "<=",
            Self::Ge => ">=",
            Self::Lt => "<",
            Self::Gt => ">",
            Self::Colon => ":",
            Self::LParen => "(",
            Self::RParen => ")",
            Self::Comma => ",",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Identifier(String),
    Integer(i64),
    Float(f64),
    Str(String),
    Op(Op),
    /// End of a statement: a line break or `;`.
    Newline,
    /// A `#= file:N =#` comment, as printed by the unparser.
    Marker { file: String, line: u32 },
    EndOfInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Keyword(k) => write!(f, "`{}`", k.as_str()),
            Self::Identifier(name) => write!(f, "identifier `{name}`"),
            Self::Integer(v) => write!(f, "integer `{v}`"),
            Self::Float(v) => write!(f, "float `{v}`"),
            Self::Str(_) => f.write_str("string literal"),
            Self::Op(op) => write!(f, "`{}`", op.as_str()),
            Self::Newline => f.write_str("newline"),
            Self::Marker { .. } => f.write_str("line marker"),
            Self::EndOfInput => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    file: &'a str,
    tokens: Vec<Token>,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    tokenize_file(source, "none")
}

pub(crate) fn tokenize_file(source: &str, file: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lexer = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file,
        tokens: Vec::new(),
    };
    lexer.run()?;
    Ok(lexer.tokens)
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, line: u32, col: u32, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            file: self.file.to_string(),
            line,
            col,
            message: message.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, text: String, line: u32, col: u32) {
        self.tokens.push(Token {
            kind,
            text,
            line,
            col,
        });
    }

    fn run(&mut self) -> Result<(), SyntaxError> {
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' | ';' => {
                    self.bump();
                    self.push(TokenKind::Newline, c.to_string(), line, col);
                }
                '#' if self.peek_at(1) == Some('=') => self.block_comment()?,
                '#' => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                '"' => self.string()?,
                c if c.is_ascii_digit() => self.number()?,
                '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => self.number()?,
                c if c.is_alphabetic() || c == '_' => self.word(),
                _ => self.operator()?,
            }
        }
        let (line, col) = (self.line, self.col);
        self.push(TokenKind::EndOfInput, String::new(), line, col);
        Ok(())
    }

    fn block_comment(&mut self) -> Result<(), SyntaxError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        self.bump();
        let mut depth = 1;
        let mut text = String::new();
        loop {
            match (self.peek(), self.peek_at(1)) {
                (None, _) => return Err(self.error(line, col, "unterminated multi-line comment")),
                (Some('='), Some('#')) => {
                    self.bump();
                    self.bump();
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    text.push_str("=#");
                }
                (Some('#'), Some('=')) => {
                    self.bump();
                    self.bump();
                    depth += 1;
                    text.push_str("#=");
                }
                (Some(c), _) => {
                    self.bump();
                    text.push(c);
                }
            }
        }
        if let Some((file, n)) = text.trim().rsplit_once(':') {
            if let Ok(marker_line) = n.parse::<u32>() {
                if !file.is_empty() && !file.contains('\n') {
                    self.push(
                        TokenKind::Marker {
                            file: file.to_string(),
                            line: marker_line,
                        },
                        format!("#={text}=#"),
                        line,
                        col,
                    );
                }
            }
        }
        Ok(())
    }

    fn string(&mut self) -> Result<(), SyntaxError> {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, col, "unterminated string literal")),
                Some('"') => break,
                Some('\\') => {
                    let esc = self.bump();
                    match esc {
                        Some('"') => value.push('"'),
                        Some('\\') => value.push('\\'),
                        Some('n') => value.push('\n'),
                        Some('t') => value.push('\t'),
                        None => return Err(self.error(line, col, "unterminated string literal")),
                        Some(other) => {
                            return Err(self.error(
                                self.line,
                                self.col - 1,
                                format!("invalid escape sequence \\{other}"),
                            ))
                        }
                    }
                }
                Some(c) => value.push(c),
            }
        }
        let text = self.chars[start..self.pos].iter().collect();
        self.push(TokenKind::Str(value), text, line, col);
        Ok(())
    }

    fn number(&mut self) -> Result<(), SyntaxError> {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        let mut is_float = false;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
            self.bump();
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
                self.bump();
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                is_float = true;
                for _ in 0..digit_at {
                    self.bump();
                }
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let digits = text.replace('_', "");
        let kind = if is_float {
            match digits.parse::<f64>() {
                Ok(v) if v.is_finite() => TokenKind::Float(v),
                _ => return Err(self.error(line, col, format!("invalid numeric constant \"{text}\""))),
            }
        } else {
            match digits.parse::<i64>() {
                Ok(v) => TokenKind::Integer(v),
                Err(_) => return Err(self.error(line, col, format!("integer literal {text} is too large"))),
            }
        };
        self.push(kind, text, line, col);
        Ok(())
    }

    fn word(&mut self) {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let kind = match Keyword::from_word(&text) {
            Some(k) => TokenKind::Keyword(k),
            None => TokenKind::Identifier(text.clone()),
        };
        self.push(kind, text, line, col);
    }

    fn operator(&mut self) -> Result<(), SyntaxError> {
        let (line, col) = (self.line, self.col);
        let c = self.bump().expect("operator called at end of input");
        let next = self.peek();
        let op = match (c, next) {
            ('=', Some('=')) => Op::Eq,
            ('!', Some('=')) => Op::NotEq,
            ('<', Some('=')) => Op::Le,
            ('>', Some('=')) => Op::Ge,
            ('+', _) => Op::Plus,
            ('-', _) => Op::Minus,
            ('*', _) => Op::Star,
            ('/', _) => Op::Slash,
            ('=', _) => Op::Assign,
            ('<', _) => Op::Lt,
            ('>', _) => Op::Gt,
            (':', _) => Op::Colon,
            ('(', _) => Op::LParen,
            (')', _) => Op::RParen,
            (',', _) => Op::Comma,
            _ => return Err(self.error(line, col, format!("unexpected character `{c}`"))),
        };
        if matches!(op, Op::Eq | Op::NotEq | Op::Le | Op::Ge) {
            self.bump();
        }
        self.push(TokenKind::Op(op), op.as_str().to_string(), line, col);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn simple_assignment() {
        assert_eq!(
            kinds("x = 1"),
            vec![
                TokenKind::Identifier("x".into()),
                TokenKind::Op(Op::Assign),
                TokenKind::Integer(1),
                TokenKind::EndOfInput
            ]
        );
    }

    #[test]
    fn unterminated_string() {
        let err = tokenize("println(\"hello Julia Programming)").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("unterminated string literal"));
    }

    #[test]
    fn comment_skipped_and_lines_tracked() {
        let toks = tokenize("# note\nx=2").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Newline);
        assert_eq!(toks[0].line, 1);
        assert_eq!(toks[1].kind, TokenKind::Identifier("x".into()));
        assert!(toks[1..].iter().all(|t| t.line == 2));
    }

    #[test]
    fn two_char_operators_and_keywords() {
        assert_eq!(
            kinds("while x <= 5 != y"),
            vec![
                TokenKind::Keyword(Keyword::While),
                TokenKind::Identifier("x".into()),
                TokenKind::Op(Op::Le),
                TokenKind::Integer(5),
                TokenKind::Op(Op::NotEq),
                TokenKind::Identifier("y".into()),
                TokenKind::EndOfInput
            ]
        );
    }

    #[test]
    fn numbers() {
        assert_eq!(kinds("1.5")[0], TokenKind::Float(1.5));
        assert_eq!(kinds("2e3")[0], TokenKind::Float(2000.0));
        assert_eq!(kinds("1.0e-7")[0], TokenKind::Float(1.0e-7));
        assert_eq!(kinds("1_000")[0], TokenKind::Integer(1000));
        // range, not a float
        assert_eq!(kinds("1:3")[1], TokenKind::Op(Op::Colon));
        assert!(tokenize("99999999999999999999").is_err());
    }

    #[test]
    fn string_escapes() {
        assert_eq!(kinds(r#""a\"b\\c\nd\te""#)[0], TokenKind::Str("a\"b\\c\nd\te".into()));
        assert!(tokenize(r#""\q""#).is_err());
        let toks = tokenize("\"a\\\"\" x").unwrap();
        assert_eq!(toks[0].text, "\"a\\\"\"");
    }

    #[test]
    fn block_comments_and_markers() {
        let toks = kinds("#= plain comment =# x");
        assert_eq!(toks[0], TokenKind::Identifier("x".into()));
        let toks = kinds("#= C:\\dir\\f.jl:12 =#\nx");
        assert_eq!(
            toks[0],
            TokenKind::Marker {
                file: "C:\\dir\\f.jl".into(),
                line: 12
            }
        );
        assert!(tokenize("#= never closed").is_err());
    }

    #[test]
    fn semicolon_is_a_separator() {
        assert_eq!(kinds("a;b")[1], TokenKind::Newline);
    }
}
