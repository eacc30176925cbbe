use std::fmt;

use crate::error::{Error, Result};
use crate::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Select,
    From,
    Where,
    Group,
    By,
    As,
    And,
    Emit,
    Stream,
    After,
    Watermark,
    Delay,
    Table,
    Descriptor,
    Create,
}

impl Keyword {
    fn lookup(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match word.to_ascii_uppercase().as_str() {
            "SELECT" => Select,
            "FROM" => From,
            "WHERE" => Where,
            "GROUP" => Group,
            "BY" => By,
            "AS" => As,
            "AND" => And,
            "EMIT" => Emit,
            "STREAM" => Stream,
            "AFTER" => After,
            "WATERMARK" => Watermark,
            "DELAY" => Delay,
            "TABLE" => Table,
            "DESCRIPTOR" => Descriptor,
            "CREATE" => Create,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Select => "SELECT",
            From => "FROM",
            Where => "WHERE",
            Group => "GROUP",
            By => "BY",
            As => "AS",
            And => "AND",
            Emit => "EMIT",
            Stream => "STREAM",
            After => "AFTER",
            Watermark => "WATERMARK",
            Delay => "DELAY",
            Table => "TABLE",
            Descriptor => "DESCRIPTOR",
            Create => "CREATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Integer(i64),
    String(String),
    /// `INTERVAL '<n>' MINUTE[S]|HOUR[S]`, folded into one token.
    Interval(Duration),
    LParen,
    RParen,
    Comma,
    Semicolon,
    Arrow,
    Dot,
    Eq,
    Lt,
    Gt,
    LtEq,
    GtEq,
    Plus,
    Minus,
    Star,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => f.write_str(k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier '{s}'"),
            TokenKind::Integer(i) => write!(f, "integer {i}"),
            TokenKind::String(s) => write!(f, "string '{s}'"),
            TokenKind::Interval(d) => write!(f, "INTERVAL '{}' MINUTES", d.as_minutes()),
            TokenKind::LParen => f.write_str("'('"),
            TokenKind::RParen => f.write_str("')'"),
            TokenKind::Comma => f.write_str("','"),
            TokenKind::Semicolon => f.write_str("';'"),
            TokenKind::Arrow => f.write_str("'=>'"),
            TokenKind::Dot => f.write_str("'.'"),
            TokenKind::Eq => f.write_str("'='"),
            TokenKind::Lt => f.write_str("'<'"),
            TokenKind::Gt => f.write_str("'>'"),
            TokenKind::LtEq => f.write_str("'<='"),
            TokenKind::GtEq => f.write_str("'>='"),
            TokenKind::Plus => f.write_str("'+'"),
            TokenKind::Minus => f.write_str("'-'"),
            TokenKind::Star => f.write_str("'*'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek2() == Some('-') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn word(&mut self) -> &'a str {
        let start = self.offset();
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        let end = self.offset();
        &self.src[start..end]
    }

    fn string(&mut self, line: usize, col: usize) -> Result<String> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(Error::syntax("unterminated string literal", line, col)),
                Some('\'') if self.peek() == Some('\'') => {
                    self.bump();
                    s.push('\'');
                }
                Some('\'') => return Ok(s),
                Some(c) => s.push(c),
            }
        }
    }

    fn interval(&mut self, line: usize, col: usize) -> Result<Duration> {
        let bad = |msg: &str| Error::syntax(format!("malformed INTERVAL literal: {msg}"), line, col);
        self.skip_trivia();
        if self.peek() != Some('\'') {
            return Err(bad("expected quoted amount"));
        }
        let (sl, sc) = (self.line, self.col);
        let amount = self.string(sl, sc)?;
        let n: i64 = amount.trim().parse().map_err(|_| bad("amount must be a non-negative integer"))?;
        self.skip_trivia();
        let unit = self.word().to_ascii_uppercase();
        let minutes = match unit.as_str() {
            "MINUTE" | "MINUTES" => Some(n),
            "HOUR" | "HOURS" => n.checked_mul(60),
            "" => return Err(bad("expected unit MINUTE or HOUR")),
            other => return Err(bad(&format!("unsupported unit {other}"))),
        };
        minutes.and_then(|m| Duration::minutes(m).ok()).ok_or_else(|| bad("amount out of range"))
    }

    fn next_token(&mut self) -> Result<Option<Token>> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else { return Ok(None) };
        let kind = match c {
            '(' | ')' | ',' | ';' | '.' | '+' | '-' | '*' => {
                self.bump();
                match c {
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    ';' => TokenKind::Semicolon,
                    '.' => TokenKind::Dot,
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    _ => TokenKind::Star,
                }
            }
            '=' => {
                self.bump();
                if self.peek() == Some('>') {
                    self.bump();
                    TokenKind::Arrow
                } else {
                    TokenKind::Eq
                }
            }
            '<' | '>' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    if c == '<' {
                        TokenKind::LtEq
                    } else {
                        TokenKind::GtEq
                    }
                } else if c == '<' {
                    TokenKind::Lt
                } else {
                    TokenKind::Gt
                }
            }
            '\'' => TokenKind::String(self.string(line, col)?),
            c if c.is_ascii_digit() => {
                let w = self.word();
                let n = w.parse().map_err(|_| Error::syntax(format!("invalid integer '{w}'"), line, col))?;
                TokenKind::Integer(n)
            }
            c if c.is_alphabetic() || c == '_' => {
                let w = self.word();
                if w.eq_ignore_ascii_case("INTERVAL") {
                    TokenKind::Interval(self.interval(line, col)?)
                } else if let Some(k) = Keyword::lookup(w) {
                    TokenKind::Keyword(k)
                } else {
                    TokenKind::Ident(w.to_string())
                }
            }
            other => return Err(Error::syntax(format!("unexpected character '{other}'"), line, col)),
        };
        Ok(Some(Token { kind, line, col }))
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer { chars: text.char_indices().peekable(), src: text, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(t) = lx.next_token()? {
        out.push(t);
    }
    Ok(out)
}
