//! Schema DDL, processing-time ordered event logs, source snapshots and
//! changelog serialization.
//!
//! Log line grammar (one entry per line, `#` starts a comment line):
//!
//! ```text
//! 8:07    WM -> 8:05
//! 8:07    WM bidtime -> 8:05
//! 8:08    INSERT (8:07, $2, A)
//! 8:09    DELETE (8:07, $2, A)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    bag_remove, ChangelogRow, ColumnDef, DisplayFormat, Relation, Row, Schema, Value, ValueKind, WatermarkState,
};
use crate::sql::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::time::{Duration, Timestamp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Insert(Row),
    Delete(Row),
    WatermarkAdvance { column: String, value: Timestamp },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub ptime: Timestamp,
    pub payload: Payload,
}

/// A row together with the processing time at which it arrived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedRow {
    pub row: Row,
    pub arrival: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceLog {
    pub name: String,
    pub schema: Schema,
    pub entries: Vec<LogEntry>,
}

impl SourceLog {
    pub fn empty(name: &str, schema: Schema) -> Self {
        SourceLog { name: name.to_string(), schema, entries: Vec::new() }
    }

    pub fn last_ptime(&self) -> Option<Timestamp> {
        self.entries.last().map(|e| e.ptime)
    }

    /// Appends an entry, enforcing the same invariants as [`parse_log`].
    pub fn push(&mut self, entry: LogEntry) -> Result<()> {
        if entry.ptime.is_bottom() {
            return Err(Error::validation("log entry at BOTTOM processing time"));
        }
        if let Some(last) = self.last_ptime() {
            if entry.ptime < last {
                return Err(Error::validation(format!("processing time {} precedes {last}", entry.ptime)));
            }
        }
        match &entry.payload {
            Payload::Insert(r) | Payload::Delete(r) => self.schema.check_row(r)?,
            Payload::WatermarkAdvance { column, value } => {
                let idx = self.schema.index_of(column).filter(|&i| self.schema.columns[i].is_event_time).ok_or_else(
                    || Error::validation(format!("'{column}' is not an event-time column of {}", self.name)),
                )?;
                let col = &self.schema.columns[idx].name;
                let prev = self.entries.iter().rev().find_map(|e| match &e.payload {
                    Payload::WatermarkAdvance { column: c, value: v } if c == col => Some((e.ptime, *v)),
                    _ => None,
                });
                if let Some((pp, pv)) = prev {
                    if *value <= pv {
                        return Err(Error::validation(format!("non-monotone watermark: {value} after {pv}")));
                    }
                    if entry.ptime <= pp {
                        return Err(Error::validation(format!("two watermark advances for {col} at {pp}")));
                    }
                }
                if value.is_bottom() {
                    return Err(Error::validation("watermark cannot advance to BOTTOM"));
                }
            }
        }
        let mut entry = entry;
        if let Payload::WatermarkAdvance { column, .. } = &mut entry.payload {
            *column = column.to_ascii_lowercase();
        }
        self.entries.push(entry);
        Ok(())
    }
}

/// Sources by case-insensitive name.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    sources: BTreeMap<String, SourceLog>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ddl(text: &str) -> Result<Self> {
        parse_schema_ddl(text)
    }

    pub fn insert(&mut self, log: SourceLog) -> Result<()> {
        let key = log.name.to_ascii_lowercase();
        if self.sources.contains_key(&key) {
            return Err(Error::validation(format!("duplicate source '{}'", log.name)));
        }
        self.sources.insert(key, log);
        Ok(())
    }

    /// Replaces the entries of an already declared source by parsing `text`.
    pub fn attach_log(&mut self, name: &str, text: &str) -> Result<()> {
        let src = self
            .sources
            .get_mut(&name.to_ascii_lowercase())
            .ok_or_else(|| Error::validation(format!("unknown source '{name}'")))?;
        let parsed = parse_log(text, &src.name, &src.schema)?;
        src.entries = parsed.entries;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&SourceLog> {
        self.sources.get(&name.to_ascii_lowercase())
    }

    pub fn sources(&self) -> impl Iterator<Item = &SourceLog> {
        self.sources.values()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Latest processing time across all logs.
    pub fn horizon(&self) -> Option<Timestamp> {
        self.sources.values().filter_map(SourceLog::last_ptime).max()
    }

    /// Watermark histories of every source's event-time columns.
    pub fn watermarks(&self) -> WatermarkState {
        let mut st = WatermarkState::new();
        for log in self.sources.values() {
            st.extend(watermark_state(log));
        }
        st
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn line(&self) -> usize {
        self.peek().or(self.toks.last()).map_or(1, |t| t.line)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token> {
        let t = self
            .toks
            .get(self.pos)
            .ok_or_else(|| Error::input(format!("expected {what}, found end of input"), self.line()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        let t = self.next(&kind.to_string())?;
        if t.kind != kind {
            return Err(Error::input(format!("expected {kind}, found {}", t.kind), t.line));
        }
        Ok(())
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize)> {
        let t = self.next(what)?;
        match &t.kind {
            TokenKind::Ident(s) => Ok((s.clone(), t.line)),
            TokenKind::Keyword(k) => Ok((k.as_str().to_string(), t.line)),
            other => Err(Error::input(format!("expected {what}, found {other}"), t.line)),
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(s), .. }) if s.eq_ignore_ascii_case(word) => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }
}

fn parse_type(name: &str, line: usize) -> Result<ValueKind> {
    Ok(match name.to_ascii_uppercase().as_str() {
        "TIMESTAMP" => ValueKind::Timestamp,
        "INT" | "INTEGER" | "BIGINT" => ValueKind::Integer,
        "STRING" | "TEXT" | "VARCHAR" => ValueKind::Text,
        "BOOLEAN" | "BOOL" => ValueKind::Boolean,
        "INTERVAL" => ValueKind::Duration,
        other => return Err(Error::input(format!("unknown type {other}"), line)),
    })
}

/// Parses `CREATE STREAM|TABLE name (col TYPE [EVENTTIME] [FORMAT '$'], ...);`
/// statements into a catalog of empty logs.
pub fn parse_schema_ddl(text: &str) -> Result<Catalog> {
    let toks = tokenize(text).map_err(|e| match e {
        Error::Syntax { msg, line, .. } => Error::input(msg, line),
        other => other,
    })?;
    let mut cur = Cursor { toks: &toks, pos: 0 };
    let mut catalog = Catalog::new();
    while cur.peek().is_some() {
        if cur.peek().map(|t| &t.kind) == Some(&TokenKind::Semicolon) {
            cur.pos += 1;
            continue;
        }
        cur.expect(TokenKind::Keyword(Keyword::Create))?;
        let kw = cur.next("STREAM or TABLE")?;
        let bounded = match kw.kind {
            TokenKind::Keyword(Keyword::Stream) => false,
            TokenKind::Keyword(Keyword::Table) => true,
            ref other => return Err(Error::input(format!("expected STREAM or TABLE, found {other}"), kw.line)),
        };
        let (name, name_line) = cur.ident("source name")?;
        cur.expect(TokenKind::LParen)?;
        let mut columns: Vec<ColumnDef> = Vec::new();
        loop {
            let (col, line) = cur.ident("column name")?;
            let (ty, ty_line) = cur.ident("column type")?;
            let mut def = ColumnDef::new(&col, parse_type(&ty, ty_line)?);
            loop {
                if cur.eat_word("EVENTTIME") {
                    if def.kind != ValueKind::Timestamp {
                        return Err(Error::input(
                            format!("EVENTTIME requires TIMESTAMP, column '{col}' is {}", def.kind),
                            line,
                        ));
                    }
                    def.is_event_time = true;
                } else if cur.eat_word("FORMAT") {
                    let t = cur.next("format string")?;
                    match &t.kind {
                        TokenKind::String(s) if s == "$" && def.kind == ValueKind::Integer => {
                            def.format = DisplayFormat::Dollar
                        }
                        TokenKind::String(s) => {
                            return Err(Error::input(format!("unsupported FORMAT '{s}' for {}", def.kind), t.line))
                        }
                        other => return Err(Error::input(format!("expected format string, found {other}"), t.line)),
                    }
                } else {
                    break;
                }
            }
            if columns.iter().any(|c| c.name == def.name) {
                return Err(Error::input(format!("duplicate column '{col}'"), line));
            }
            columns.push(def);
            let t = cur.next("',' or ')'")?;
            match t.kind {
                TokenKind::Comma => continue,
                TokenKind::RParen => break,
                ref other => return Err(Error::input(format!("expected ',' or ')', found {other}"), t.line)),
            }
        }
        cur.expect(TokenKind::Semicolon)?;
        let schema = Schema::new(columns, bounded).map_err(|e| Error::input(e.to_string(), name_line))?;
        catalog.insert(SourceLog::empty(&name, schema)).map_err(|e| Error::input(e.to_string(), name_line))?;
    }
    Ok(catalog)
}

/// Splits `(a, 'b, c', d)` into raw value tokens.
fn split_tuple(body: &str) -> Option<Vec<String>> {
    let inner = body.trim().strip_prefix('(')?.strip_suffix(')')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\'' if quoted && chars.peek() == Some(&'\'') => {
                cur.push_str("''");
                chars.next();
            }
            '\'' => {
                quoted = !quoted;
                cur.push(c);
            }
            ',' if !quoted => out.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(c),
        }
    }
    if quoted {
        return None;
    }
    out.push(cur.trim().to_string());
    Some(out)
}

fn parse_value(raw: &str, col: &ColumnDef) -> std::result::Result<Value, String> {
    let bad = || format!("cannot parse '{raw}' as {} for column '{}'", col.kind, col.display);
    if raw.eq_ignore_ascii_case("NULL") {
        return Ok(Value::Null);
    }
    Ok(match col.kind {
        ValueKind::Timestamp => Value::Timestamp(raw.parse().map_err(|_| bad())?),
        ValueKind::Integer => {
            let digits = raw.strip_prefix('$').unwrap_or(raw);
            Value::Integer(digits.parse().map_err(|_| bad())?)
        }
        ValueKind::Duration => {
            Value::Duration(raw.parse().ok().and_then(|m| Duration::minutes(m).ok()).ok_or_else(bad)?)
        }
        ValueKind::Boolean => match raw.to_ascii_uppercase().as_str() {
            "TRUE" => Value::Boolean(true),
            "FALSE" => Value::Boolean(false),
            _ => return Err(bad()),
        },
        ValueKind::Text => match raw.strip_prefix('\'').and_then(|s| s.strip_suffix('\'')) {
            Some(q) => Value::Text(q.replace("''", "'")),
            None if raw.is_empty() => return Err(bad()),
            None => Value::Text(raw.to_string()),
        },
    })
}

fn parse_row(body: &str, schema: &Schema) -> std::result::Result<Row, String> {
    let raw = split_tuple(body).ok_or_else(|| format!("malformed tuple '{}'", body.trim()))?;
    if raw.len() != schema.arity() {
        return Err(format!("arity mismatch: {} values for {} columns", raw.len(), schema.arity()));
    }
    let values =
        raw.iter().zip(&schema.columns).map(|(r, c)| parse_value(r, c)).collect::<std::result::Result<Vec<_>, _>>()?;
    let row = Row(values);
    schema.check_row(&row).map_err(|e| e.to_string())?;
    Ok(row)
}

/// Parses a log file against its source schema. Entry order is verified,
/// never sorted.
pub fn parse_log(text: &str, name: &str, schema: &Schema) -> Result<SourceLog> {
    let mut log = SourceLog::empty(name, schema.clone());
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::input(msg, lineno);
        let (ptime_s, rest) =
            line.split_once(char::is_whitespace).ok_or_else(|| err(format!("malformed log line '{line}'")))?;
        let ptime: Timestamp = ptime_s.parse().map_err(|e: Error| err(e.to_string()))?;
        let rest = rest.trim_start();
        let (verb, body) =
            rest.split_once(|c: char| c.is_whitespace() || c == '(').map_or((rest, ""), |(v, _)| (v, &rest[v.len()..]));
        let payload = match verb.to_ascii_uppercase().as_str() {
            "INSERT" => Payload::Insert(parse_row(body, schema).map_err(err)?),
            "DELETE" => Payload::Delete(parse_row(body, schema).map_err(err)?),
            "WM" => {
                let (lhs, value_s) =
                    body.split_once("->").ok_or_else(|| err("expected '->' in watermark line".into()))?;
                let column = match lhs.trim() {
                    "" => {
                        let mut et = schema.event_time_columns();
                        match (et.next(), et.next()) {
                            (Some((_, c)), None) => c.name.clone(),
                            (None, _) => return Err(err(format!("source {name} has no event-time column"))),
                            _ => {
                                return Err(err("watermark line must name a column when several are event-time".into()))
                            }
                        }
                    }
                    c => c.to_string(),
                };
                let value: Timestamp = value_s.trim().parse().map_err(|e: Error| err(e.to_string()))?;
                Payload::WatermarkAdvance { column, value }
            }
            other => return Err(err(format!("unknown log verb '{other}'"))),
        };
        log.push(LogEntry { ptime, payload }).map_err(|e| err(e.to_string()))?;
    }
    Ok(log)
}

/// Rows present at `ptime`, each tagged with its insertion time. A DELETE
/// retracts the most recently inserted matching occurrence.
pub fn timed_snapshot(log: &SourceLog, ptime: Timestamp) -> Result<Vec<TimedRow>> {
    let mut rows: Vec<TimedRow> = Vec::new();
    for e in log.entries.iter().take_while(|e| e.ptime <= ptime) {
        apply_entry(&mut rows, e)?;
    }
    Ok(rows)
}

pub(crate) fn apply_entry(rows: &mut Vec<TimedRow>, e: &LogEntry) -> Result<()> {
    match &e.payload {
        Payload::Insert(r) => rows.push(TimedRow { row: r.clone(), arrival: e.ptime }),
        Payload::Delete(r) => match rows.iter().rposition(|t| &t.row == r) {
            Some(i) => {
                rows.remove(i);
            }
            None => return Err(Error::RetractionUnderflow(format!("DELETE at {} of absent row {r:?}", e.ptime))),
        },
        Payload::WatermarkAdvance { .. } => {}
    }
    Ok(())
}

/// The source relation as of processing time `ptime`.
pub fn snapshot(log: &SourceLog, ptime: Timestamp) -> Result<Relation> {
    let mut bag = Vec::new();
    for e in log.entries.iter().take_while(|e| e.ptime <= ptime) {
        match &e.payload {
            Payload::Insert(r) => bag.push(r.clone()),
            Payload::Delete(r) => bag_remove(&mut bag, r)?,
            Payload::WatermarkAdvance { .. } => {}
        }
    }
    Ok(Relation::new(log.schema.clone(), bag))
}

pub fn watermark_state(log: &SourceLog) -> WatermarkState {
    let mut st = WatermarkState::new();
    for (_, c) in log.schema.event_time_columns() {
        st.declare(&log.name, &c.name);
    }
    for e in &log.entries {
        if let Payload::WatermarkAdvance { column, value } = &e.payload {
            st.push(&log.name, column, e.ptime, *value).expect("log invariants guarantee monotone watermarks");
        }
    }
    st
}

fn render_log_value(v: &Value, col: &ColumnDef) -> String {
    match v {
        Value::Null => "NULL".to_string(),
        Value::Text(s) => {
            let plain = !s.is_empty()
                && !s.eq_ignore_ascii_case("null")
                && s.chars().all(|c| !c.is_whitespace() && !matches!(c, ',' | '(' | ')' | '\''));
            if plain {
                s.clone()
            } else {
                format!("'{}'", s.replace('\'', "''"))
            }
        }
        Value::Duration(d) => d.as_minutes().to_string(),
        other => other.render(col.format),
    }
}

fn render_tuple(row: &Row, schema: &Schema) -> String {
    let vals: Vec<String> = row.0.iter().zip(&schema.columns).map(|(v, c)| render_log_value(v, c)).collect();
    format!("({})", vals.join(", "))
}

pub fn serialize_log(log: &SourceLog) -> String {
    let mut out = String::new();
    for e in &log.entries {
        let _ = match &e.payload {
            Payload::Insert(r) => writeln!(out, "{} INSERT {}", e.ptime, render_tuple(r, &log.schema)),
            Payload::Delete(r) => writeln!(out, "{} DELETE {}", e.ptime, render_tuple(r, &log.schema)),
            Payload::WatermarkAdvance { column, value } => writeln!(out, "{} WM {column} -> {value}", e.ptime),
        };
    }
    out
}

/// Renders a changelog as a loadable log: inserts become INSERT lines and
/// undos become DELETE lines.
pub fn serialize_changelog(rows: &[ChangelogRow], schema: &Schema) -> String {
    let mut out = String::new();
    for r in rows {
        let verb = if r.undo { "DELETE" } else { "INSERT" };
        let _ = writeln!(out, "{} {verb} {}", r.ptime, render_tuple(&r.row, schema));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{changelog_fold, watermark_at};
    use proptest::prelude::*;

    pub(crate) const BID_DDL: &str =
        "CREATE STREAM Bid (bidtime TIMESTAMP EVENTTIME, price INT FORMAT '$', item STRING);";
    pub(crate) const BID_LOG: &str = "\
8:07    WM -> 8:05
8:08    INSERT (8:07, $2, A)
8:12    INSERT (8:11, $3, B)
8:13    INSERT (8:05, $4, C)
8:14    WM -> 8:08
8:15    INSERT (8:09, $5, D)
8:16    WM -> 8:12
8:17    INSERT (8:13, $1, E)
8:18    INSERT (8:17, $6, F)
8:21    WM -> 8:20
";

    fn bid_log() -> SourceLog {
        let cat = parse_schema_ddl(BID_DDL).unwrap();
        let schema = cat.get("bid").unwrap().schema.clone();
        parse_log(BID_LOG, "Bid", &schema).unwrap()
    }

    fn t(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    fn bid(bt: &str, price: i64, item: &str) -> Row {
        Row(vec![Value::Timestamp(t(bt)), Value::Integer(price), Value::Text(item.into())])
    }

    #[test]
    fn ddl_bid_stream() {
        let cat = parse_schema_ddl(BID_DDL).unwrap();
        let s = &cat.get("BID").unwrap().schema;
        assert!(!s.bounded);
        assert_eq!(s.arity(), 3);
        assert!(s.columns[0].is_event_time);
        assert_eq!(s.columns[1].format, DisplayFormat::Dollar);
    }

    #[test]
    fn ddl_bounded_table() {
        let cat = parse_schema_ddl("CREATE TABLE T (x INT);").unwrap();
        let s = &cat.get("t").unwrap().schema;
        assert!(s.bounded);
        assert_eq!(s.event_time_columns().count(), 0);
    }

    #[test]
    fn ddl_errors() {
        let e = parse_schema_ddl("CREATE STREAM S (p INT EVENTTIME);").unwrap_err();
        assert!(e.to_string().contains("EVENTTIME requires TIMESTAMP"), "{e}");
        let e = parse_schema_ddl("CREATE TABLE T (x INT,\n X INT);").unwrap_err();
        assert_eq!(e, Error::input("duplicate column 'X'", 2));
        let e = parse_schema_ddl("CREATE TABLE T (x INT);\nCREATE STREAM t (y INT);").unwrap_err();
        assert!(matches!(e, Error::Input { line: 2, .. }), "{e}");
    }

    #[test]
    fn parse_q7_dataset() {
        let log = bid_log();
        assert_eq!(log.entries.len(), 10);
        let inserts = log.entries.iter().filter(|e| matches!(e.payload, Payload::Insert(_))).count();
        let wms = log.entries.iter().filter(|e| matches!(e.payload, Payload::WatermarkAdvance { .. })).count();
        assert_eq!((inserts, wms), (6, 4));
        assert_eq!(log.entries[9].payload, Payload::WatermarkAdvance { column: "bidtime".into(), value: t("8:20") });
    }

    #[test]
    fn parse_empty_and_errors() {
        let schema = bid_log().schema;
        assert!(parse_log("", "Bid", &schema).unwrap().entries.is_empty());
        assert!(parse_log("# comment only\n\n", "Bid", &schema).unwrap().entries.is_empty());
        let e = parse_log("8:10 WM -> 8:05\n8:11 WM -> 8:03", "Bid", &schema).unwrap_err();
        assert!(matches!(e, Error::Input { line: 2, .. }) && e.to_string().contains("non-monotone"), "{e}");
        let e = parse_log("8:10 INSERT (8:07, $2, A)\n8:09 INSERT (8:07, $2, A)", "Bid", &schema).unwrap_err();
        assert!(matches!(e, Error::Input { line: 2, .. }), "{e}");
        let e = parse_log("8:10 INSERT (8:07, $2)", "Bid", &schema).unwrap_err();
        assert!(e.to_string().contains("arity"), "{e}");
        let e = parse_log("8:10 INSERT (8:07, two, A)", "Bid", &schema).unwrap_err();
        assert!(e.to_string().contains("cannot parse"), "{e}");
        let e = parse_log("8:10 INSERT (NULL, $2, A)", "Bid", &schema).unwrap_err();
        assert!(e.to_string().contains("NULL in event-time"), "{e}");
        let e = parse_log("8:10 WM price -> 8:00", "Bid", &schema).unwrap_err();
        assert!(e.to_string().contains("not an event-time column"), "{e}");
    }

    #[test]
    fn snapshots_of_q7_log() {
        let log = bid_log();
        let s = snapshot(&log, t("8:13")).unwrap();
        assert!(s.bag_eq(&Relation::new(
            log.schema.clone(),
            vec![bid("8:07", 2, "A"), bid("8:11", 3, "B"), bid("8:05", 4, "C")]
        )));
        assert!(snapshot(&log, t("8:00")).unwrap().is_empty());
        assert!(snapshot(&log, Timestamp::BOTTOM).unwrap().is_empty());
        assert_eq!(snapshot(&log, t("8:21")).unwrap().len(), 6);
    }

    #[test]
    fn delete_semantics() {
        let schema = bid_log().schema;
        let log = parse_log(
            "8:01 INSERT (8:00, $1, A)\n8:02 INSERT (8:00, $1, A)\n8:03 DELETE (8:00, $1, A)",
            "Bid",
            &schema,
        )
        .unwrap();
        assert_eq!(snapshot(&log, t("8:03")).unwrap().len(), 1);
        let timed = timed_snapshot(&log, t("8:03")).unwrap();
        assert_eq!(timed[0].arrival, t("8:01"));
        let bad = parse_log("8:03 DELETE (8:00, $1, A)", "Bid", &schema).unwrap();
        assert!(matches!(snapshot(&bad, t("8:03")), Err(Error::RetractionUnderflow(_))));
    }

    #[test]
    fn watermark_extraction() {
        let log = bid_log();
        let st = watermark_state(&log);
        assert_eq!(
            st.entries("bid", "bidtime").unwrap(),
            &[(t("8:07"), t("8:05")), (t("8:14"), t("8:08")), (t("8:16"), t("8:12")), (t("8:21"), t("8:20"))]
        );
        let empty = parse_log("8:08 INSERT (8:07, $2, A)", "Bid", &log.schema).unwrap();
        assert_eq!(watermark_at(&watermark_state(&empty), "bid", "bidtime", t("9:00")).unwrap(), Timestamp::BOTTOM);
    }

    #[test]
    fn two_event_time_columns_are_independent() {
        let cat = parse_schema_ddl("CREATE STREAM S (a TIMESTAMP EVENTTIME, b TIMESTAMP EVENTTIME);").unwrap();
        let schema = cat.get("s").unwrap().schema.clone();
        let text = "1:00 WM a -> 0:10\n1:01 WM b -> 0:05\n1:02 WM a -> 0:20\n1:03 WM b -> 0:06\n1:04 WM a -> 0:30";
        let log = parse_log(text, "S", &schema).unwrap();
        assert!(parse_log("1:00 WM -> 0:10", "S", &schema).is_err());
        let st = watermark_state(&log);
        // Direct scan oracle.
        for col in ["a", "b"] {
            let expect: Vec<(Timestamp, Timestamp)> = text
                .lines()
                .filter_map(|l| {
                    let parts: Vec<&str> = l.split_whitespace().collect();
                    (parts[2] == col).then(|| (t(parts[0]), t(parts[4])))
                })
                .collect();
            assert_eq!(st.entries("s", col).unwrap(), expect.as_slice());
        }
    }

    #[test]
    fn text_quoting_round_trips() {
        let cat = parse_schema_ddl("CREATE TABLE T (s STRING, n INT);").unwrap();
        let schema = cat.get("t").unwrap().schema.clone();
        let mut log = SourceLog::empty("T", schema.clone());
        for s in ["plain", "with space", "a,b", "it's", "(x)", "null", "'q'"] {
            log.push(LogEntry {
                ptime: t("1:00"),
                payload: Payload::Insert(Row(vec![Value::Text(s.into()), Value::Null])),
            })
            .unwrap();
        }
        assert_eq!(parse_log(&serialize_log(&log), "T", &schema).unwrap(), log);
    }

    fn arb_log() -> impl Strategy<Value = SourceLog> {
        let schema = bid_log().schema;
        prop::collection::vec((0i64..3, 0i64..20, 1i64..6, 0usize..3, prop::bool::ANY), 0..20).prop_map(move |ops| {
            let mut log = SourceLog::empty("Bid", schema.clone());
            let mut p = 480;
            for (dp, bt, price, item, delete) in ops {
                p += dp;
                let row = Row(vec![
                    Value::Timestamp(Timestamp::from_minutes(480 + bt)),
                    Value::Integer(price),
                    Value::Text(["A", "B", "C"][item].into()),
                ]);
                let present = snapshot(&log, Timestamp::from_minutes(p)).unwrap().rows.contains(&row);
                let payload = if delete && present { Payload::Delete(row) } else { Payload::Insert(row) };
                log.push(LogEntry { ptime: Timestamp::from_minutes(p), payload }).unwrap();
            }
            log
        })
    }

    proptest! {
        #[test]
        fn log_round_trip(log in arb_log()) {
            prop_assert_eq!(parse_log(&serialize_log(&log), "Bid", &log.schema).unwrap(), log);
        }

        #[test]
        fn snapshot_equals_prefix_replay(log in arb_log()) {
            for k in 0..log.entries.len() {
                let p = log.entries[k].ptime;
                // brute force: replay every entry whose ptime is <= p.
                let mut bag: Vec<Row> = Vec::new();
                for e in log.entries.iter().filter(|e| e.ptime <= p) {
                    match &e.payload {
                        Payload::Insert(r) => bag.push(r.clone()),
                        Payload::Delete(r) => { let i = bag.iter().position(|x| x == r).unwrap(); bag.remove(i); }
                        Payload::WatermarkAdvance { .. } => {}
                    }
                }
                prop_assert!(snapshot(&log, p).unwrap().bag_eq(&Relation::new(log.schema.clone(), bag)));
                let timed: Vec<Row> = timed_snapshot(&log, p).unwrap().into_iter().map(|t| t.row).collect();
                prop_assert!(snapshot(&log, p).unwrap().bag_eq(&Relation::new(log.schema.clone(), timed)));
            }
        }

        #[test]
        fn insert_only_snapshots_grow(log in arb_log(), a in 480i64..545, b in 0i64..30) {
            let ins: Vec<LogEntry> = log.entries.iter().filter(|e| matches!(e.payload, Payload::Insert(_))).cloned().collect();
            let log = SourceLog { entries: ins, ..log };
            let s1 = snapshot(&log, Timestamp::from_minutes(a)).unwrap();
            let s2 = snapshot(&log, Timestamp::from_minutes(a + b)).unwrap();
            prop_assert!(s1.is_sub_bag_of(&s2));
        }

        #[test]
        fn changelog_round_trip(log in arb_log()) {
            // Treat the log itself as a changelog and compare fold vs reloaded snapshots.
            let rows: Vec<ChangelogRow> = log.entries.iter().filter_map(|e| match &e.payload {
                Payload::Insert(r) => Some(ChangelogRow { row: r.clone(), undo: false, ptime: e.ptime, ver: 0 }),
                Payload::Delete(r) => Some(ChangelogRow { row: r.clone(), undo: true, ptime: e.ptime, ver: 0 }),
                _ => None,
            }).collect();
            let reloaded = parse_log(&serialize_changelog(&rows, &log.schema), "Bid", &log.schema).unwrap();
            for r in &rows {
                let folded = changelog_fold(&rows, &log.schema, r.ptime).unwrap();
                prop_assert!(snapshot(&reloaded, r.ptime).unwrap().bag_eq(&folded));
            }
        }
    }
}
