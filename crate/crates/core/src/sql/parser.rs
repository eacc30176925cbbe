//! Recursive-descent parser for SELECT queries with windowing TVFs and a
//! trailing EMIT clause.

use crate::error::{Error, Result};
use crate::sql::ast::*;
use crate::sql::lexer::{tokenize, Keyword, Token, TokenKind};

pub fn parse_sql(text: &str) -> Result<Query> {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    parse_tokens(&tokenize(text)?, Some((line, col)))
}

/// Parses exactly one query, optionally terminated by `;`.
pub fn parse_query(tokens: &[Token]) -> Result<Query> {
    parse_tokens(tokens, None)
}

fn parse_tokens(tokens: &[Token], end: Option<(usize, usize)>) -> Result<Query> {
    let mut p = Parser { toks: tokens, pos: 0, end };
    let q = p.select(true)?;
    p.eat(&TokenKind::Semicolon);
    if let Some(t) = p.peek() {
        return Err(p.unexpected(t, "end of query"));
    }
    Ok(q)
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// Position just past the source text, when known.
    end: Option<(usize, usize)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'a TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_kind_at(&self, n: usize) -> Option<&'a TokenKind> {
        self.toks.get(self.pos + n).map(|t| &t.kind)
    }

    fn eof_error(&self, expected: &str) -> Error {
        let (line, col) = self.end.or(self.toks.last().map(|t| (t.line, t.col + 1))).unwrap_or((1, 1));
        Error::syntax(format!("expected {expected}, found end of input"), line, col)
    }

    fn unexpected(&self, t: &Token, expected: &str) -> Error {
        Error::syntax(format!("expected {expected}, found {}", t.kind), t.line, t.col)
    }

    fn next(&mut self, expected: &str) -> Result<&'a Token> {
        let t = self.peek().ok_or_else(|| self.eof_error(expected))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Keyword(kw))
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        let t = self.next(&kind.to_string())?;
        if t.kind != kind {
            return Err(self.unexpected(t, &kind.to_string()));
        }
        Ok(())
    }

    fn expect_kw(&mut self, kw: Keyword) -> Result<()> {
        self.expect(TokenKind::Keyword(kw))
    }

    fn ident(&mut self, expected: &str) -> Result<String> {
        let t = self.next(expected)?;
        match &t.kind {
            TokenKind::Ident(s) => Ok(s.clone()),
            _ => Err(self.unexpected(t, expected)),
        }
    }

    fn alias(&mut self) -> Result<Option<String>> {
        if self.eat_kw(Keyword::As) {
            return self.ident("alias").map(Some);
        }
        match self.peek_kind() {
            Some(TokenKind::Ident(s)) => {
                self.pos += 1;
                Ok(Some(s.clone()))
            }
            _ => Ok(None),
        }
    }

    fn select(&mut self, top: bool) -> Result<Query> {
        self.expect_kw(Keyword::Select)?;
        let mut items = Vec::new();
        loop {
            if self.eat(&TokenKind::Star) {
                items.push(SelectItem::Wildcard);
            } else {
                let expr = self.expr()?;
                let alias = self.alias()?;
                items.push(SelectItem::Expr { expr, alias });
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect_kw(Keyword::From)?;
        let mut from = vec![self.table_ref()?];
        while self.eat(&TokenKind::Comma) {
            from.push(self.table_ref()?);
        }
        let selection = if self.eat_kw(Keyword::Where) { Some(self.expr()?) } else { None };
        let mut group_by = Vec::new();
        if self.eat_kw(Keyword::Group) {
            self.expect_kw(Keyword::By)?;
            loop {
                group_by.push(self.expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        let emit = match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword(Keyword::Emit) => {
                if !top {
                    return Err(Error::syntax("nested EMIT unsupported", t.line, t.col));
                }
                self.pos += 1;
                Some(self.emit_clause(t)?)
            }
            _ => None,
        };
        Ok(Query { items, from, selection, group_by, emit })
    }

    fn emit_clause(&mut self, emit_tok: &Token) -> Result<EmitSpec> {
        let mut spec = EmitSpec { stream: self.eat_kw(Keyword::Stream), ..EmitSpec::default() };
        let mut first = true;
        loop {
            let after = if self.eat_kw(Keyword::After) {
                true
            } else if !first && self.eat_kw(Keyword::And) {
                self.expect_kw(Keyword::After)?;
                true
            } else {
                false
            };
            if !after {
                break;
            }
            first = false;
            let t = self.next("WATERMARK or DELAY")?;
            match t.kind {
                TokenKind::Keyword(Keyword::Watermark) if !spec.after_watermark => spec.after_watermark = true,
                TokenKind::Keyword(Keyword::Delay) if spec.delay.is_none() => {
                    let d = self.next("INTERVAL literal")?;
                    match d.kind {
                        TokenKind::Interval(dur) => spec.delay = Some(dur),
                        _ => return Err(self.unexpected(d, "INTERVAL literal")),
                    }
                }
                TokenKind::Keyword(Keyword::Watermark) | TokenKind::Keyword(Keyword::Delay) => {
                    return Err(Error::syntax(format!("duplicate AFTER {} in EMIT", t.kind), t.line, t.col))
                }
                _ => return Err(self.unexpected(t, "WATERMARK or DELAY")),
            }
        }
        if spec.is_default() {
            return Err(Error::syntax("EMIT requires STREAM or an AFTER clause", emit_tok.line, emit_tok.col));
        }
        Ok(spec)
    }

    fn table_ref(&mut self) -> Result<FromItem> {
        if self.eat(&TokenKind::LParen) {
            let query = self.select(false)?;
            self.expect(TokenKind::RParen)?;
            let alias = self.alias()?;
            return Ok(FromItem::Subquery { query: Box::new(query), alias });
        }
        let name = self.ident("table name or subquery")?;
        if self.eat(&TokenKind::LParen) {
            let args = self.tvf_args()?;
            let alias = self.alias()?;
            return Ok(FromItem::Tvf(TvfCall { name, args, alias }));
        }
        let alias = self.alias()?;
        Ok(FromItem::Table { name, alias })
    }

    /// Arguments after the opening paren. The separator comma may be omitted
    /// before a named argument.
    fn tvf_args(&mut self) -> Result<Vec<TvfArg>> {
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            let name = match (self.peek_kind(), self.peek_kind_at(1)) {
                (Some(TokenKind::Ident(n)), Some(TokenKind::Arrow)) => {
                    self.pos += 2;
                    Some(n.clone())
                }
                _ => None,
            };
            let value = if self.eat_kw(Keyword::Table) {
                let paren = self.eat(&TokenKind::LParen);
                let t = self.ident("table name")?;
                if paren {
                    self.expect(TokenKind::RParen)?;
                }
                ArgValue::Table(t)
            } else if self.eat_kw(Keyword::Descriptor) {
                self.expect(TokenKind::LParen)?;
                let c = self.ident("column name")?;
                self.expect(TokenKind::RParen)?;
                ArgValue::Descriptor(c)
            } else {
                ArgValue::Expr(self.expr()?)
            };
            args.push(TvfArg { name, value });
            if self.eat(&TokenKind::RParen) {
                return Ok(args);
            }
            if !self.eat(&TokenKind::Comma) {
                let named_next = matches!(
                    (self.peek_kind(), self.peek_kind_at(1)),
                    (Some(TokenKind::Ident(_)), Some(TokenKind::Arrow))
                );
                if !named_next {
                    let t = self.next("',' or ')'")?;
                    return Err(self.unexpected(t, "',' or ')'"));
                }
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr> {
        let mut left = self.primary()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Keyword(Keyword::And)) => BinOp::And,
                Some(TokenKind::Eq) => BinOp::Eq,
                Some(TokenKind::Lt) => BinOp::Lt,
                Some(TokenKind::LtEq) => BinOp::LtEq,
                Some(TokenKind::Gt) => BinOp::Gt,
                Some(TokenKind::GtEq) => BinOp::GtEq,
                Some(TokenKind::Plus) => BinOp::Plus,
                Some(TokenKind::Minus) => BinOp::Minus,
                _ => break,
            };
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let right = self.binary(prec + 1)?;
            left = Expr::binary(op, left, right);
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.next("expression")?;
        match &t.kind {
            TokenKind::Integer(i) => Ok(Expr::Integer(*i)),
            TokenKind::Minus => match self.next("integer")? {
                Token { kind: TokenKind::Integer(i), .. } => Ok(Expr::Integer(-*i)),
                other => Err(self.unexpected(other, "integer")),
            },
            TokenKind::String(s) => Ok(Expr::String(s.clone())),
            TokenKind::Interval(d) => Ok(Expr::Interval(*d)),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                if self.eat(&TokenKind::LParen) {
                    let func = AggFunc::lookup(name)
                        .ok_or_else(|| Error::syntax(format!("unknown function '{name}'"), t.line, t.col))?;
                    let arg = if func == AggFunc::Count && self.eat(&TokenKind::Star) {
                        None
                    } else {
                        Some(Box::new(self.expr()?))
                    };
                    self.expect(TokenKind::RParen)?;
                    return Ok(Expr::Aggregate { func, arg });
                }
                if self.eat(&TokenKind::Dot) {
                    let col = self.ident("column name")?;
                    return Ok(Expr::Column { qualifier: Some(name.clone()), name: col });
                }
                Ok(Expr::Column { qualifier: None, name: name.clone() })
            }
            _ => Err(self.unexpected(t, "expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Duration;

    #[test]
    fn emit_variants() {
        let q = parse_sql("SELECT * FROM Bid EMIT STREAM AFTER WATERMARK;").unwrap();
        assert_eq!(q.emit, Some(EmitSpec { stream: true, after_watermark: true, delay: None }));
        let six = Some(Duration::minutes(6).unwrap());
        let q = parse_sql("SELECT * FROM Bid EMIT STREAM AFTER DELAY INTERVAL '6' MINUTES;").unwrap();
        assert_eq!(q.emit, Some(EmitSpec { stream: true, after_watermark: false, delay: six }));
        let q = parse_sql("SELECT * FROM Bid EMIT AFTER DELAY INTERVAL '6' MINUTES AND AFTER WATERMARK").unwrap();
        assert_eq!(q.emit, Some(EmitSpec { stream: false, after_watermark: true, delay: six }));
        let q = parse_sql("SELECT * FROM Bid EMIT AFTER WATERMARK AND AFTER DELAY INTERVAL '6' MINUTES").unwrap();
        assert_eq!(q.emit, Some(EmitSpec { stream: false, after_watermark: true, delay: six }));
        assert_eq!(parse_sql("SELECT * FROM Bid").unwrap().emit, None);
        assert!(parse_sql("SELECT * FROM Bid EMIT;").is_err());
        assert!(parse_sql("SELECT * FROM Bid EMIT AFTER WATERMARK AND AFTER WATERMARK;").is_err());
        assert!(parse_sql("SELECT * FROM Bid EMIT AFTER WATERMARK AND;").is_err());
    }

    #[test]
    fn nested_emit_rejected() {
        let e = parse_sql("SELECT * FROM (SELECT * FROM Bid EMIT STREAM);").unwrap_err();
        assert!(e.to_string().starts_with("nested EMIT unsupported at line 1"), "{e}");
    }

    #[test]
    fn syntax_errors_name_expected_token() {
        let e = parse_sql("SELECT price Bid").unwrap_err();
        assert_eq!(e.to_string(), "expected FROM, found end of input at line 1, col 17");
        let e = parse_sql("SELECT a FROM t WHERE").unwrap_err();
        assert!(e.to_string().starts_with("expected expression"), "{e}");
        let e = parse_sql("SELECT foo(a) FROM t").unwrap_err();
        assert!(e.to_string().contains("unknown function"), "{e}");
    }

    #[test]
    fn table_argument_spellings() {
        for s in ["TABLE(Bid)", "TABLE Bid", "TABLE (Bid)"] {
            let q = parse_sql(&format!(
                "SELECT * FROM Tumble(data => {s}, timecol => DESCRIPTOR(bidtime), dur => INTERVAL '10' MINUTES)"
            ))
            .unwrap();
            let FromItem::Tvf(call) = &q.from[0] else { panic!() };
            assert_eq!(call.args[0].value, ArgValue::Table("Bid".into()));
        }
    }

    #[test]
    fn precedence_and_printing() {
        let q = parse_sql("SELECT a FROM t WHERE a >= b - INTERVAL '10' MINUTE AND a < b").unwrap();
        let printed = q.to_string();
        assert_eq!(printed, "SELECT a FROM t WHERE a >= b - INTERVAL '10' MINUTES AND a < b");
        assert_eq!(parse_sql(&printed).unwrap(), q);
        let q = parse_sql("SELECT a - (b - c) FROM t").unwrap();
        assert_eq!(parse_sql(&q.to_string()).unwrap(), q);
    }
}
