use std::fmt;
use std::sync::Arc;

use super::ast::{BinaryOp, Expression, Function};

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnexpectedEnd,
    UnexpectedToken(String),
    UnbalancedParenthesis,
    UnknownFunction(String),
    TrailingInput(String),
    InvalidNumber(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::EmptyInput => write!(f, "empty expression")?,
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input")?,
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected `{t}`")?,
            ParseErrorKind::UnbalancedParenthesis => write!(f, "unbalanced parenthesis")?,
            ParseErrorKind::UnknownFunction(name) => write!(f, "unknown function `{name}`")?,
            ParseErrorKind::TrailingInput(t) => write!(f, "trailing input `{t}`")?,
            ParseErrorKind::InvalidNumber(t) => write!(f, "invalid number `{t}`")?,
        }
        write!(f, " at offset {}", self.offset)?;
        if !self.expected.is_empty() {
            write!(f, ", expected {}", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => v.to_string(),
            Token::Ident(s) => s.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::InvalidNumber(text.to_string()),
                expected: vec![],
            })?;
            out.push((Token::Number(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(src[start..i].to_string()), start));
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError {
            offset: start,
            kind: ParseErrorKind::UnexpectedToken(ch.to_string()),
            expected: vec![],
        });
    }
    out.push((Token::End, src.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    open_parens: Vec<usize>,
}

const EXPECT_OPERAND: &[&str] = &["expression"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Token {
        let idx = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[idx].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&self, expected: &[&'static str]) -> ParseError {
        let kind = match self.peek() {
            Token::End => ParseErrorKind::UnexpectedEnd,
            Token::RParen if self.open_parens.is_empty() => ParseErrorKind::UnbalancedParenthesis,
            tok => ParseErrorKind::UnexpectedToken(tok.describe()),
        };
        ParseError { offset: self.offset(), kind, expected: expected.to_vec() }
    }

    fn expression(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expression::Binary(op, Arc::new(lhs), Arc::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expression::Binary(op, Arc::new(lhs), Arc::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        if *self.peek() != Token::Minus {
            return self.power();
        }
        self.advance();
        // `-2` is a literal, `-2^2` is -(2^2)
        if let (Token::Number(v), next) = (self.peek().clone(), self.peek_at(1)) {
            if *next != Token::Caret {
                self.advance();
                return Ok(Expression::Number(-v));
            }
        }
        let operand = self.unary()?;
        Ok(Expression::Neg(Arc::new(operand)))
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Token::Caret {
            self.advance();
            let exponent = self.unary()?;
            return Ok(Expression::Binary(BinaryOp::Pow, Arc::new(base), Arc::new(exponent)));
        }
        Ok(base)
    }

    fn parenthesized(&mut self) -> Result<Expression, ParseError> {
        let open = self.offset();
        self.advance();
        self.open_parens.push(open);
        let inner = self.expression()?;
        if *self.peek() != Token::RParen {
            let mut err = self.error_here(&[")"]);
            if *self.peek() == Token::End {
                err.kind = ParseErrorKind::UnbalancedParenthesis;
            }
            return Err(err);
        }
        self.advance();
        self.open_parens.pop();
        Ok(inner)
    }

    fn primary(&mut self) -> Result<Expression, ParseError> {
        match self.peek().clone() {
            Token::Number(v) => {
                self.advance();
                Ok(Expression::Number(v))
            }
            Token::Ident(name) => {
                let start = self.offset();
                self.advance();
                if *self.peek() == Token::LParen {
                    let func = Function::from_name(&name).ok_or_else(|| ParseError {
                        offset: start,
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                        expected: Function::ALL.iter().map(|f| f.name()).collect(),
                    })?;
                    let arg = self.parenthesized()?;
                    Ok(Expression::Call(func, Arc::new(arg)))
                } else if name == "pi" {
                    Ok(Expression::Pi)
                } else {
                    Ok(Expression::Variable(Arc::from(name.as_str())))
                }
            }
            Token::LParen => self.parenthesized(),
            _ => Err(self.error_here(EXPECT_OPERAND)),
        }
    }
}

/// Parses `source` into an [`Expression`].
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    let tokens = tokenize(source)?;
    if tokens.len() == 1 {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::EmptyInput,
            expected: EXPECT_OPERAND.to_vec(),
        });
    }
    let mut parser = Parser { tokens, pos: 0, open_parens: Vec::new() };
    let expr = parser.expression()?;
    match parser.peek() {
        Token::End => Ok(expr),
        Token::RParen => Err(ParseError {
            offset: parser.offset(),
            kind: ParseErrorKind::UnbalancedParenthesis,
            expected: vec!["operator", "end of input"],
        }),
        tok => Err(ParseError {
            offset: parser.offset(),
            kind: ParseErrorKind::TrailingInput(tok.describe()),
            expected: vec!["operator", "end of input"],
        }),
    }
}
