//! Query evaluation: table views at a processing-time cursor and changelog
//! streams over a processing-time range, under each EMIT materialization.

mod relational;

use std::collections::{BTreeMap, BTreeSet};

pub use relational::{eval_aggregate_functions, eval_relational, eval_scalar, SourceInputs};

use crate::error::{Error, Result};
use crate::eventlog::{Catalog, LogEntry};
use crate::model::{is_complete, relation_diff, ChangelogRow, Relation, Row, Value, VerState, WatermarkState};
use crate::sql::plan::{BoundQuery, WatermarkRef};
use crate::time::{Duration, Timestamp};

/// Everything an evaluation reads: source logs, the processing-time cursor
/// for table views, and the watermark history of every source.
#[derive(Debug, Clone)]
pub struct EvalContext<'a> {
    pub catalog: &'a Catalog,
    pub cursor: Timestamp,
    pub watermarks: WatermarkState,
}

impl<'a> EvalContext<'a> {
    pub fn new(catalog: &'a Catalog, cursor: Timestamp) -> Self {
        EvalContext { catalog, cursor, watermarks: catalog.watermarks() }
    }

    /// Cursor at the latest processing time present in any log.
    pub fn at_horizon(catalog: &'a Catalog) -> Self {
        Self::new(catalog, catalog.horizon().unwrap_or(Timestamp::BOTTOM))
    }
}

/// The table view of `q` at `ctx.cursor`. The `stream` flag of the EMIT
/// clause is ignored; the remaining directives gate what is visible.
pub fn eval_table(q: &BoundQuery, ctx: &EvalContext<'_>) -> Result<Relation> {
    if q.emit.delay.is_some() {
        let mut m = Materializer::new(q);
        replay(q, ctx, ctx.cursor, &mut m, |_, _, _| Ok(()))?;
        return Ok(m.relation());
    }
    let sources = q.plan.sources();
    let inputs = SourceInputs::snapshot(ctx.catalog, &sources, ctx.cursor)?;
    let current = eval_relational(&q.plan, &inputs, &ctx.watermarks)?;
    if q.emit.after_watermark {
        let gate = Gate::new(q);
        let rows = filter_rows(current.rows, |r| gate.row_complete(r, &ctx.watermarks, ctx.cursor))?;
        return Ok(Relation::new(current.schema, rows));
    }
    Ok(current)
}

/// Changelog of `q` for processing times in `[from, to]`. Evaluation starts
/// at the origin so that revision numbers and pending timers are the same
/// whatever `from` is; delay timers due after `to` do not fire.
pub fn eval_stream(q: &BoundQuery, ctx: &EvalContext<'_>, from: Timestamp, to: Timestamp) -> Result<Vec<ChangelogRow>> {
    let mut ver = VerState::keyed_by(q.window_key.clone());
    let mut out = Vec::new();
    let mut m = Materializer::new(q);
    replay(q, ctx, to, &mut m, |t, old, new| {
        let diff = relation_diff(old, new, t, &mut ver)?;
        if t >= from {
            out.extend(diff);
        }
        Ok(())
    })?;
    Ok(out)
}

fn filter_rows(rows: Vec<Row>, mut keep: impl FnMut(&Row) -> Result<bool>) -> Result<Vec<Row>> {
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        if keep(&r)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// Completeness tests for output rows and window keys.
struct Gate {
    /// Every watermarked output column.
    columns: Vec<(usize, WatermarkRef)>,
    /// Positions within the window key that are watermarked, with their refs.
    key_columns: Vec<(usize, WatermarkRef)>,
}

impl Gate {
    fn new(q: &BoundQuery) -> Self {
        let columns: Vec<(usize, WatermarkRef)> = q
            .plan
            .schema
            .columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.watermark.clone().filter(|_| c.def.is_event_time).map(|w| (i, w)))
            .collect();
        let key_columns = q
            .window_key
            .iter()
            .enumerate()
            .filter_map(|(pos, col)| columns.iter().find(|(i, _)| i == col).map(|(_, w)| (pos, w.clone())))
            .collect();
        Gate { columns, key_columns }
    }

    fn all_complete<'v>(
        refs: impl Iterator<Item = (&'v Value, &'v WatermarkRef)>,
        wm: &WatermarkState,
        at: Timestamp,
    ) -> Result<bool> {
        for (v, w) in refs {
            let Some(t) = v.as_timestamp() else { return Ok(false) };
            if !is_complete(t, wm.at(&w.source, &w.column, at)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A row is complete once every watermarked column is.
    fn row_complete(&self, row: &Row, wm: &WatermarkState, at: Timestamp) -> Result<bool> {
        Self::all_complete(self.columns.iter().map(|(i, w)| (&row.0[*i], w)), wm, at)
    }

    /// A window key is complete once every watermarked key column is. Keys
    /// with no watermarked column never complete.
    fn key_complete(&self, key: &[Value], wm: &WatermarkState, at: Timestamp) -> Result<bool> {
        if self.key_columns.is_empty() {
            return Ok(false);
        }
        Self::all_complete(self.key_columns.iter().map(|(p, w)| (&key[*p], w)), wm, at)
    }
}

enum Mode {
    Continuous,
    Watermark,
    Delay { delay: Duration, with_watermark: bool },
}

/// The materialized view a consumer sees, advanced one processing time at a
/// time from the ungated query result.
struct Materializer {
    mode: Mode,
    gate: Gate,
    schema: crate::model::Schema,
    window_key: Vec<usize>,
    /// Materialized rows by window key, each bag kept sorted.
    view: BTreeMap<Vec<Value>, Vec<Row>>,
    timers: BTreeMap<Vec<Value>, Timestamp>,
    finalized: BTreeSet<Vec<Value>>,
}

impl Materializer {
    fn new(q: &BoundQuery) -> Self {
        let mode = match (q.emit.delay, q.emit.after_watermark) {
            (Some(delay), with_watermark) => Mode::Delay { delay, with_watermark },
            (None, true) => Mode::Watermark,
            (None, false) => Mode::Continuous,
        };
        Materializer {
            mode,
            gate: Gate::new(q),
            schema: q.output_schema(),
            window_key: q.window_key.clone(),
            view: BTreeMap::new(),
            timers: BTreeMap::new(),
            finalized: BTreeSet::new(),
        }
    }

    fn relation(&self) -> Relation {
        Relation::new(self.schema.clone(), self.view.values().flatten().cloned().collect())
    }

    fn next_timer(&self) -> Option<Timestamp> {
        self.timers.values().min().copied()
    }

    fn grouped(&self, rows: Vec<Row>) -> BTreeMap<Vec<Value>, Vec<Row>> {
        let mut out: BTreeMap<Vec<Value>, Vec<Row>> = BTreeMap::new();
        for r in rows {
            out.entry(r.project(&self.window_key)).or_default().push(r);
        }
        for rows in out.values_mut() {
            rows.sort();
        }
        out
    }

    fn advance(&mut self, t: Timestamp, current: Relation, wm: &WatermarkState) -> Result<()> {
        match self.mode {
            Mode::Continuous => self.view = self.grouped(current.rows),
            Mode::Watermark => {
                let rows = filter_rows(current.rows, |r| self.gate.row_complete(r, wm, t))?;
                self.view = self.grouped(rows);
            }
            Mode::Delay { delay, with_watermark } => {
                let mut current = self.grouped(current.rows);
                let keys: BTreeSet<Vec<Value>> = current.keys().chain(self.view.keys()).cloned().collect();
                for key in keys {
                    let now = current.remove(&key).unwrap_or_default();
                    let shown = self.view.get(&key).map(Vec::as_slice).unwrap_or(&[]);
                    if now.as_slice() != shown && !self.timers.contains_key(&key) {
                        let fire = t.checked_add(delay).ok_or_else(|| Error::validation("delay timer overflows"))?;
                        self.timers.insert(key.clone(), fire);
                    }
                    let completes =
                        with_watermark && !self.finalized.contains(&key) && self.gate.key_complete(&key, wm, t)?;
                    let fires = self.timers.get(&key).is_some_and(|&f| f <= t);
                    if completes || fires {
                        self.timers.remove(&key);
                        if completes {
                            self.finalized.insert(key.clone());
                        }
                        if now.is_empty() {
                            self.view.remove(&key);
                        } else {
                            self.view.insert(key, now);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Steps `m` through every processing time up to `to` at which a log entry
/// lands or a timer is due, calling `on_step(t, before, after)` each time.
fn replay(
    q: &BoundQuery,
    ctx: &EvalContext<'_>,
    to: Timestamp,
    m: &mut Materializer,
    mut on_step: impl FnMut(Timestamp, &Relation, &Relation) -> Result<()>,
) -> Result<()> {
    let sources = q.plan.sources();
    let mut entries: Vec<(&str, &LogEntry)> = Vec::new();
    for s in &sources {
        let log = ctx.catalog.get(s).ok_or_else(|| Error::validation(format!("unknown source '{s}'")))?;
        entries.extend(log.entries.iter().map(|e| (s.as_str(), e)));
    }
    entries.sort_by_key(|(_, e)| e.ptime);
    let mut inputs = SourceInputs::new();
    for s in &sources {
        inputs.declare(s);
    }
    let mut next = 0;
    let mut before = m.relation();
    loop {
        let t = match (entries.get(next).map(|(_, e)| e.ptime), m.next_timer()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => break,
        };
        if t > to {
            break;
        }
        while let Some((s, e)) = entries.get(next).filter(|(_, e)| e.ptime == t) {
            inputs.apply(s, e)?;
            next += 1;
        }
        let current = eval_relational(&q.plan, &inputs, &ctx.watermarks)?;
        m.advance(t, current, &ctx.watermarks)?;
        let after = m.relation();
        on_step(t, &before, &after)?;
        before = after;
    }
    Ok(())
}
