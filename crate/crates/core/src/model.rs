//! Values, schemas, bag relations, watermarks and the changelog algebra
//! (diff, fold, completeness) that the rest of the engine builds on.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::time::{Duration, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Integer,
    Text,
    Timestamp,
    Duration,
    Boolean,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::Integer => "INT",
            ValueKind::Text => "STRING",
            ValueKind::Timestamp => "TIMESTAMP",
            ValueKind::Duration => "INTERVAL",
            ValueKind::Boolean => "BOOLEAN",
        })
    }
}

/// Rendering hint attached to a column. Does not affect the stored value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DisplayFormat {
    #[default]
    Plain,
    /// Integers rendered as `$N`.
    Dollar,
}

/// A single cell. The derived order (by variant, then payload) is the total
/// order used for deterministic row sorting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Boolean(bool),
    Integer(i64),
    Text(String),
    Timestamp(Timestamp),
    Duration(Duration),
}

impl Value {
    pub fn kind(&self) -> Option<ValueKind> {
        Some(match self {
            Value::Null => return None,
            Value::Boolean(_) => ValueKind::Boolean,
            Value::Integer(_) => ValueKind::Integer,
            Value::Text(_) => ValueKind::Text,
            Value::Timestamp(_) => ValueKind::Timestamp,
            Value::Duration(_) => ValueKind::Duration,
        })
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_timestamp(&self) -> Option<Timestamp> {
        match self {
            Value::Timestamp(t) => Some(*t),
            _ => None,
        }
    }

    pub fn render(&self, format: DisplayFormat) -> String {
        match (self, format) {
            (Value::Null, _) => String::new(),
            (Value::Boolean(b), _) => if *b { "TRUE" } else { "FALSE" }.to_string(),
            (Value::Integer(i), DisplayFormat::Dollar) => format!("${i}"),
            (Value::Integer(i), DisplayFormat::Plain) => i.to_string(),
            (Value::Text(s), _) => s.clone(),
            (Value::Timestamp(t), _) => t.to_string(),
            (Value::Duration(d), _) => d.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnDef {
    /// Lower-cased lookup name.
    pub name: String,
    /// Spelling used in headers.
    pub display: String,
    pub kind: ValueKind,
    pub is_event_time: bool,
    pub format: DisplayFormat,
}

impl ColumnDef {
    pub fn new(name: &str, kind: ValueKind) -> Self {
        ColumnDef {
            name: name.to_ascii_lowercase(),
            display: name.to_string(),
            kind,
            is_event_time: false,
            format: DisplayFormat::Plain,
        }
    }

    pub fn event_time(name: &str) -> Self {
        ColumnDef { is_event_time: true, ..ColumnDef::new(name, ValueKind::Timestamp) }
    }

    pub fn with_format(mut self, format: DisplayFormat) -> Self {
        self.format = format;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schema {
    pub columns: Vec<ColumnDef>,
    /// Whether the source is declared finite (`CREATE TABLE`).
    pub bounded: bool,
}

impl Schema {
    pub fn new(columns: Vec<ColumnDef>, bounded: bool) -> Result<Self> {
        for (i, c) in columns.iter().enumerate() {
            if c.is_event_time && c.kind != ValueKind::Timestamp {
                return Err(Error::validation(format!("event-time column '{}' must be TIMESTAMP", c.display)));
            }
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::validation(format!("duplicate column '{}'", c.display)));
            }
        }
        Ok(Schema { columns, bounded })
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        let name = name.to_ascii_lowercase();
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn event_time_columns(&self) -> impl Iterator<Item = (usize, &ColumnDef)> {
        self.columns.iter().enumerate().filter(|(_, c)| c.is_event_time)
    }

    /// Same arity and positional kinds. Names and flags may differ.
    pub fn compatible_with(&self, other: &Schema) -> bool {
        self.arity() == other.arity() && self.columns.iter().zip(&other.columns).all(|(a, b)| a.kind == b.kind)
    }

    pub fn check_row(&self, row: &Row) -> Result<()> {
        if row.0.len() != self.arity() {
            return Err(Error::validation(format!(
                "row has {} values, schema has {} columns",
                row.0.len(),
                self.arity()
            )));
        }
        for (v, c) in row.0.iter().zip(&self.columns) {
            match v.kind() {
                None if c.is_event_time => {
                    return Err(Error::validation(format!("NULL in event-time column '{}'", c.display)))
                }
                Some(k) if k != c.kind => {
                    return Err(Error::validation(format!(
                        "value of kind {k} in column '{}' of kind {}",
                        c.display, c.kind
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Row(pub Vec<Value>);

impl Row {
    pub fn new(values: Vec<Value>) -> Self {
        Row(values)
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn project(&self, cols: &[usize]) -> Vec<Value> {
        cols.iter().map(|&i| self.0[i].clone()).collect()
    }
}

impl From<Vec<Value>> for Row {
    fn from(v: Vec<Value>) -> Self {
        Row(v)
    }
}

/// One instantaneous snapshot of a time-varying relation, as a bag.
#[derive(Debug, Clone)]
pub struct Relation {
    pub schema: Schema,
    pub rows: Vec<Row>,
}

impl Relation {
    pub fn new(schema: Schema, rows: Vec<Row>) -> Self {
        Relation { schema, rows }
    }

    pub fn empty(schema: Schema) -> Self {
        Relation { schema, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn counts(&self) -> BTreeMap<&Row, usize> {
        bag_counts(&self.rows)
    }

    pub fn sorted_rows(&self) -> Vec<Row> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    /// Bag equality of contents; schemas are not compared.
    pub fn bag_eq(&self, other: &Relation) -> bool {
        self.sorted_rows() == other.sorted_rows()
    }

    /// Sub-bag test: every row occurs in `other` at least as often.
    pub fn is_sub_bag_of(&self, other: &Relation) -> bool {
        let theirs = other.counts();
        self.counts().into_iter().all(|(r, n)| theirs.get(r).copied().unwrap_or(0) >= n)
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema && self.bag_eq(other)
    }
}

pub(crate) fn bag_counts(rows: &[Row]) -> BTreeMap<&Row, usize> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry(r).or_insert(0) += 1;
    }
    m
}

/// Removes one occurrence of `row`, erroring with a retraction underflow if
/// none is present.
pub(crate) fn bag_remove(rows: &mut Vec<Row>, row: &Row) -> Result<()> {
    match rows.iter().position(|r| r == row) {
        Some(i) => {
            rows.remove(i);
            Ok(())
        }
        None => Err(Error::RetractionUnderflow(format!("{row:?} not present"))),
    }
}

/// Per `(source, column)` watermark history: `(ptime, value)` pairs, both
/// strictly increasing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WatermarkState {
    entries: BTreeMap<(String, String), Vec<(Timestamp, Timestamp)>>,
}

impl WatermarkState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a column with no watermark yet, so lookups return `BOTTOM`
    /// instead of failing.
    pub fn declare(&mut self, source: &str, column: &str) {
        self.entries.entry(key(source, column)).or_default();
    }

    pub fn push(&mut self, source: &str, column: &str, ptime: Timestamp, value: Timestamp) -> Result<()> {
        let seq = self.entries.entry(key(source, column)).or_default();
        if let Some(&(lp, lv)) = seq.last() {
            if ptime <= lp || value <= lv {
                return Err(Error::validation(format!(
                    "non-monotone watermark for {source}.{column}: ({lp}, {lv}) then ({ptime}, {value})"
                )));
            }
        }
        seq.push((ptime, value));
        Ok(())
    }

    /// Merges another state's columns in. Columns must not overlap.
    pub fn extend(&mut self, other: WatermarkState) {
        self.entries.extend(other.entries);
    }

    pub fn entries(&self, source: &str, column: &str) -> Option<&[(Timestamp, Timestamp)]> {
        self.entries.get(&key(source, column)).map(Vec::as_slice)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.keys().map(|(s, c)| (s.as_str(), c.as_str()))
    }

    /// Latest watermark with entry ptime `<= ptime`, or `BOTTOM`.
    pub fn at(&self, source: &str, column: &str, ptime: Timestamp) -> Result<Timestamp> {
        let seq = self.lookup(source, column)?;
        let n = seq.partition_point(|&(p, _)| p <= ptime);
        Ok(if n == 0 { Timestamp::BOTTOM } else { seq[n - 1].1 })
    }

    /// Watermark in force just before `ptime`: latest entry with ptime
    /// strictly less. A row arriving at `ptime` is judged late against this.
    pub fn before(&self, source: &str, column: &str, ptime: Timestamp) -> Result<Timestamp> {
        let seq = self.lookup(source, column)?;
        let n = seq.partition_point(|&(p, _)| p < ptime);
        Ok(if n == 0 { Timestamp::BOTTOM } else { seq[n - 1].1 })
    }

    fn lookup(&self, source: &str, column: &str) -> Result<&[(Timestamp, Timestamp)]> {
        self.entries
            .get(&key(source, column))
            .map(Vec::as_slice)
            .ok_or_else(|| Error::validation(format!("no event-time column {source}.{column}")))
    }
}

fn key(source: &str, column: &str) -> (String, String) {
    (source.to_ascii_lowercase(), column.to_ascii_lowercase())
}

pub fn watermark_at(state: &WatermarkState, source: &str, column: &str, ptime: Timestamp) -> Result<Timestamp> {
    state.at(source, column, ptime)
}

/// A grouping keyed at `key` is complete once the watermark has reached it.
pub fn is_complete(key: Timestamp, watermark: Timestamp) -> bool {
    !key.is_bottom() && key <= watermark
}

/// One row of a stream changelog.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChangelogRow {
    pub row: Row,
    pub undo: bool,
    pub ptime: Timestamp,
    pub ver: u64,
}

/// Per-window revision counters for one evaluation.
#[derive(Debug, Clone, Default)]
pub struct VerState {
    key_columns: Vec<usize>,
    counters: BTreeMap<Vec<Value>, u64>,
}

impl VerState {
    /// Keys rows by the listed output columns. An empty list puts every row
    /// under one global key.
    pub fn keyed_by(key_columns: Vec<usize>) -> Self {
        VerState { key_columns, counters: BTreeMap::new() }
    }

    /// Keys rows by the values of the schema's event-time columns.
    pub fn event_time_keyed(schema: &Schema) -> Self {
        Self::keyed_by(schema.event_time_columns().map(|(i, _)| i).collect())
    }

    pub fn key_columns(&self) -> &[usize] {
        &self.key_columns
    }

    pub fn window_key(&self, row: &Row) -> Vec<Value> {
        row.project(&self.key_columns)
    }

    fn next(&mut self, key: Vec<Value>) -> u64 {
        let c = self.counters.entry(key).or_insert(0);
        let v = *c;
        *c += 1;
        v
    }
}

/// Changelog rows turning `old` into `new`, all stamped `ptime`: undos first,
/// then inserts, each group ordered by window key and then row value.
pub fn relation_diff(
    old: &Relation,
    new: &Relation,
    ptime: Timestamp,
    ver: &mut VerState,
) -> Result<Vec<ChangelogRow>> {
    if !old.schema.compatible_with(&new.schema) {
        return Err(Error::Internal("relation_diff over incompatible schemas".into()));
    }
    let before = old.counts();
    let after = new.counts();
    let mut undos = Vec::new();
    let mut inserts = Vec::new();
    for (&row, &n) in &before {
        let m = after.get(row).copied().unwrap_or(0);
        undos.extend(std::iter::repeat_n(row, n.saturating_sub(m)));
    }
    for (&row, &m) in &after {
        let n = before.get(row).copied().unwrap_or(0);
        inserts.extend(std::iter::repeat_n(row, m.saturating_sub(n)));
    }
    let mut out = Vec::with_capacity(undos.len() + inserts.len());
    for (undo, mut group) in [(true, undos), (false, inserts)] {
        group.sort_by_cached_key(|r| (ver.window_key(r), (*r).clone()));
        for row in group {
            let v = ver.next(ver.window_key(row));
            out.push(ChangelogRow { row: row.clone(), undo, ptime, ver: v });
        }
    }
    Ok(out)
}

/// Replays changelog rows with `ptime <= upto` onto an empty bag.
pub fn changelog_fold(rows: &[ChangelogRow], schema: &Schema, upto: Timestamp) -> Result<Relation> {
    let mut bag = Vec::new();
    for r in rows.iter().filter(|r| r.ptime <= upto) {
        if r.undo {
            bag_remove(&mut bag, &r.row)?;
        } else {
            bag.push(r.row.clone());
        }
    }
    Ok(Relation::new(schema.clone(), bag))
}
