//! Tumble and Hop windowing table-valued functions.
//!
//! Windows are right-open intervals `[wstart, wend)`. Window starts are
//! aligned to `offset + k * step` using floor division, so instants before
//! the epoch partition the same way as those after it.

use crate::error::{Error, Result};
use crate::model::{ColumnDef, Relation, Row, Schema, Value};
use crate::time::{Duration, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowKind {
    Tumble,
    Hop { hopsize: Duration },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub timecol: String,
    pub dur: Duration,
    pub offset: Duration,
}

impl WindowSpec {
    pub fn tumble(timecol: &str, dur: Duration) -> Self {
        WindowSpec { kind: WindowKind::Tumble, timecol: timecol.to_ascii_lowercase(), dur, offset: Duration::ZERO }
    }

    pub fn hop(timecol: &str, dur: Duration, hopsize: Duration) -> Self {
        WindowSpec { kind: WindowKind::Hop { hopsize }, ..Self::tumble(timecol, dur) }
    }

    pub fn with_offset(mut self, offset: Duration) -> Self {
        self.offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dur.is_zero() {
            return Err(Error::validation("window duration must be positive"));
        }
        if let WindowKind::Hop { hopsize } = self.kind {
            if hopsize.is_zero() {
                return Err(Error::validation("hop size must be positive"));
            }
        }
        Ok(())
    }

    pub fn assign(&self, t: Timestamp) -> Result<Vec<(Timestamp, Timestamp)>> {
        match self.kind {
            WindowKind::Tumble => tumble_assign(t, self.dur, self.offset).map(|w| vec![w]),
            WindowKind::Hop { hopsize } => hop_assign(t, self.dur, hopsize, self.offset),
        }
    }
}

fn finite(t: Timestamp) -> Result<i64> {
    t.minutes().ok_or_else(|| Error::validation("cannot assign a window to BOTTOM"))
}

pub fn tumble_assign(t: Timestamp, dur: Duration, offset: Duration) -> Result<(Timestamp, Timestamp)> {
    let t = finite(t)?;
    let (d, o) = (dur.as_minutes(), offset.as_minutes());
    if d <= 0 {
        return Err(Error::validation("window duration must be positive"));
    }
    let start = o + (t - o).div_euclid(d) * d;
    Ok((Timestamp::from_minutes(start), Timestamp::from_minutes(start + d)))
}

/// Every hopping window containing `t`, by increasing start. Empty when `t`
/// falls in a gap (hopsize > dur).
pub fn hop_assign(
    t: Timestamp,
    dur: Duration,
    hopsize: Duration,
    offset: Duration,
) -> Result<Vec<(Timestamp, Timestamp)>> {
    let t = finite(t)?;
    let (d, h, o) = (dur.as_minutes(), hopsize.as_minutes(), offset.as_minutes());
    if d <= 0 || h <= 0 {
        return Err(Error::validation("window duration and hop size must be positive"));
    }
    // Latest start <= t, then walk back while the window still covers t.
    let mut start = o + (t - o).div_euclid(h) * h;
    let mut out = Vec::new();
    while start + d > t {
        out.push((Timestamp::from_minutes(start), Timestamp::from_minutes(start + d)));
        start -= h;
    }
    out.reverse();
    Ok(out)
}

/// `[wstart, wend]` followed by the input columns; both bounds are
/// event-time columns.
pub fn window_output_schema(input: &Schema) -> Schema {
    let mut columns = vec![ColumnDef::event_time("wstart"), ColumnDef::event_time("wend")];
    columns.extend(input.columns.iter().cloned());
    Schema { columns, bounded: input.bounded }
}

pub fn apply_window_tvf(input: &Relation, spec: &WindowSpec) -> Result<Relation> {
    spec.validate()?;
    let idx = input
        .schema
        .index_of(&spec.timecol)
        .ok_or_else(|| Error::validation(format!("unknown column '{}'", spec.timecol)))?;
    if !input.schema.columns[idx].is_event_time {
        return Err(Error::validation(format!(
            "'{}' is not a watermarked event-time column",
            input.schema.columns[idx].display
        )));
    }
    let mut rows = Vec::new();
    for r in &input.rows {
        rows.extend(window_rows(r, idx, spec)?);
    }
    Ok(Relation::new(window_output_schema(&input.schema), rows))
}

pub(crate) fn window_rows(row: &Row, timecol: usize, spec: &WindowSpec) -> Result<Vec<Row>> {
    let t = row.0[timecol]
        .as_timestamp()
        .ok_or_else(|| Error::validation("NULL or non-timestamp value in window time column"))?;
    Ok(spec
        .assign(t)?
        .into_iter()
        .map(|(ws, we)| {
            let mut v = Vec::with_capacity(row.0.len() + 2);
            v.push(Value::Timestamp(ws));
            v.push(Value::Timestamp(we));
            v.extend(row.0.iter().cloned());
            Row(v)
        })
        .collect())
}
