//! Classical bag-semantics evaluation of a logical plan over one snapshot of
//! its inputs. Rows carry their arrival processing time so that aggregates
//! keyed on event time can drop input that arrived after its group was
//! already complete.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eventlog::{apply_entry, timed_snapshot, Catalog, LogEntry, TimedRow};
use crate::model::{is_complete, Relation, Row, Value, WatermarkState};
use crate::sql::ast::BinOp;
use crate::sql::plan::{AggKind, AggregateCall, LogicalPlan, PlanOp, ScalarExpr};
use crate::time::{Duration, Timestamp};
use crate::windowing::window_rows;

/// The rows of each scanned source at one processing time.
#[derive(Debug, Clone, Default)]
pub struct SourceInputs {
    rows: BTreeMap<String, Vec<TimedRow>>,
}

impl SourceInputs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Snapshots of the named sources at `ptime`.
    pub fn snapshot(catalog: &Catalog, sources: &[String], ptime: Timestamp) -> Result<Self> {
        let mut rows = BTreeMap::new();
        for s in sources {
            let log = catalog.get(s).ok_or_else(|| Error::validation(format!("unknown source '{s}'")))?;
            rows.insert(s.to_ascii_lowercase(), timed_snapshot(log, ptime)?);
        }
        Ok(SourceInputs { rows })
    }

    /// Static relations with no arrival history; nothing is ever late.
    pub fn from_relations<'a>(inputs: impl IntoIterator<Item = (&'a str, &'a Relation)>) -> Self {
        let rows = inputs
            .into_iter()
            .map(|(name, rel)| {
                let timed = rel.rows.iter().map(|r| TimedRow { row: r.clone(), arrival: Timestamp::BOTTOM }).collect();
                (name.to_ascii_lowercase(), timed)
            })
            .collect();
        SourceInputs { rows }
    }

    pub fn get(&self, source: &str) -> Option<&[TimedRow]> {
        self.rows.get(&source.to_ascii_lowercase()).map(Vec::as_slice)
    }

    pub(crate) fn declare(&mut self, source: &str) {
        self.rows.entry(source.to_ascii_lowercase()).or_default();
    }

    pub(crate) fn apply(&mut self, source: &str, entry: &LogEntry) -> Result<()> {
        apply_entry(self.rows.entry(source.to_ascii_lowercase()).or_default(), entry)
    }
}

/// Evaluates `plan` over `inputs`. `watermarks` supplies the history used
/// by the late-input rule.
pub fn eval_relational(plan: &LogicalPlan, inputs: &SourceInputs, watermarks: &WatermarkState) -> Result<Relation> {
    let rows = eval_timed(plan, inputs, watermarks)?.into_iter().map(|t| t.row).collect();
    Ok(Relation::new(plan.schema.to_schema(), rows))
}

pub(crate) fn eval_timed(plan: &LogicalPlan, inputs: &SourceInputs, wm: &WatermarkState) -> Result<Vec<TimedRow>> {
    match &plan.op {
        PlanOp::Scan { source } => inputs
            .get(source)
            .map(<[TimedRow]>::to_vec)
            .ok_or_else(|| Error::validation(format!("no input provided for source '{source}'"))),
        PlanOp::WindowTvf { input, spec, timecol } => {
            let mut out = Vec::new();
            for t in eval_timed(input, inputs, wm)? {
                out.extend(
                    window_rows(&t.row, *timecol, spec)?.into_iter().map(|row| TimedRow { row, arrival: t.arrival }),
                );
            }
            Ok(out)
        }
        PlanOp::Filter { input, predicate } => {
            let mut out = eval_timed(input, inputs, wm)?;
            let mut keep = Vec::with_capacity(out.len());
            for t in out.drain(..) {
                if is_true(&eval_scalar(predicate, &t.row)?) {
                    keep.push(t);
                }
            }
            Ok(keep)
        }
        PlanOp::Project { input, exprs } => eval_timed(input, inputs, wm)?
            .into_iter()
            .map(|t| {
                let values = exprs.iter().map(|e| eval_scalar(e, &t.row)).collect::<Result<Vec<_>>>()?;
                Ok(TimedRow { row: Row(values), arrival: t.arrival })
            })
            .collect(),
        PlanOp::Join { left, right, predicate } => {
            let l = eval_timed(left, inputs, wm)?;
            let r = eval_timed(right, inputs, wm)?;
            let mut out = Vec::new();
            for a in &l {
                for b in &r {
                    let mut values = a.row.0.clone();
                    values.extend(b.row.0.iter().cloned());
                    let row = Row(values);
                    let keep = match predicate {
                        Some(p) => is_true(&eval_scalar(p, &row)?),
                        None => true,
                    };
                    if keep {
                        out.push(TimedRow { row, arrival: a.arrival.max(b.arrival) });
                    }
                }
            }
            Ok(out)
        }
        PlanOp::Aggregate { input, keys, aggregates } => {
            let rows = eval_timed(input, inputs, wm)?;
            // Event-time keys whose watermark can declare a group complete.
            let gated: Vec<(usize, &str, &str)> = keys
                .iter()
                .filter_map(|&k| {
                    let c = &input.schema.columns[k];
                    c.watermark
                        .as_ref()
                        .filter(|_| c.def.is_event_time)
                        .map(|w| (k, w.source.as_str(), w.column.as_str()))
                })
                .collect();
            let mut groups: BTreeMap<Vec<Value>, Vec<&TimedRow>> = BTreeMap::new();
            'rows: for t in &rows {
                for &(k, source, column) in &gated {
                    if let Some(v) = t.row.0[k].as_timestamp() {
                        if is_complete(v, wm.before(source, column, t.arrival)?) {
                            continue 'rows;
                        }
                    }
                }
                groups.entry(t.row.project(keys)).or_default().push(t);
            }
            let mut out = Vec::with_capacity(groups.len());
            for (key, members) in groups {
                let arrival = members.iter().map(|t| t.arrival).max().unwrap_or(Timestamp::BOTTOM);
                let group: Vec<Row> = members.into_iter().map(|t| t.row.clone()).collect();
                let mut values = key;
                values.extend(eval_aggregate_functions(&group, aggregates)?);
                out.push(TimedRow { row: Row(values), arrival });
            }
            Ok(out)
        }
    }
}

fn is_true(v: &Value) -> bool {
    matches!(v, Value::Boolean(true))
}

/// Row-level scalar evaluation with SQL three-valued logic.
pub fn eval_scalar(expr: &ScalarExpr, row: &Row) -> Result<Value> {
    Ok(match expr {
        ScalarExpr::Column(i) => row.0[*i].clone(),
        ScalarExpr::Literal(v) => v.clone(),
        ScalarExpr::Binary { op: BinOp::And, left, right } => {
            match (eval_scalar(left, row)?, eval_scalar(right, row)?) {
                (Value::Boolean(false), _) | (_, Value::Boolean(false)) => Value::Boolean(false),
                (Value::Boolean(true), Value::Boolean(true)) => Value::Boolean(true),
                _ => Value::Null,
            }
        }
        ScalarExpr::Binary { op, left, right } => {
            let (l, r) = (eval_scalar(left, row)?, eval_scalar(right, row)?);
            if l.is_null() || r.is_null() {
                return Ok(Value::Null);
            }
            let overflow = || Error::validation(format!("arithmetic overflow in {l:?} {} {r:?}", op.as_str()));
            match op {
                BinOp::Eq => Value::Boolean(l == r),
                BinOp::Lt => Value::Boolean(l < r),
                BinOp::LtEq => Value::Boolean(l <= r),
                BinOp::Gt => Value::Boolean(l > r),
                BinOp::GtEq => Value::Boolean(l >= r),
                BinOp::Plus | BinOp::Minus => {
                    let plus = *op == BinOp::Plus;
                    match (&l, &r) {
                        (Value::Timestamp(t), Value::Duration(d)) | (Value::Duration(d), Value::Timestamp(t))
                            if plus =>
                        {
                            Value::Timestamp(t.checked_add(*d).ok_or_else(overflow)?)
                        }
                        (Value::Timestamp(t), Value::Duration(d)) => {
                            Value::Timestamp(t.checked_sub(*d).ok_or_else(overflow)?)
                        }
                        (Value::Integer(a), Value::Integer(b)) => Value::Integer(
                            if plus { a.checked_add(*b) } else { a.checked_sub(*b) }.ok_or_else(overflow)?,
                        ),
                        (Value::Duration(a), Value::Duration(b)) => {
                            let (a, b) = (a.as_minutes(), b.as_minutes());
                            Value::Duration(Duration::minutes(if plus { a + b } else { a - b })?)
                        }
                        _ => return Err(Error::Internal(format!("ill-typed arithmetic {l:?} {} {r:?}", op.as_str()))),
                    }
                }
                BinOp::And => unreachable!(),
            }
        }
    })
}

fn extremum(group: &[Row], arg: &ScalarExpr, want: Ordering) -> Result<Value> {
    let mut best: Option<Value> = None;
    for r in group {
        let v = eval_scalar(arg, r)?;
        if v.is_null() {
            continue;
        }
        if best.as_ref().is_none_or(|b| v.cmp(b) == want) {
            best = Some(v);
        }
    }
    Ok(best.unwrap_or(Value::Null))
}

/// Aggregate values for one non-empty group, in `aggs` order.
pub fn eval_aggregate_functions(group: &[Row], aggs: &[AggregateCall]) -> Result<Vec<Value>> {
    aggs.iter()
        .map(|a| {
            let arg = || a.arg.as_ref().ok_or_else(|| Error::Internal(format!("{:?} without argument", a.kind)));
            Ok(match a.kind {
                AggKind::Max => extremum(group, arg()?, Ordering::Greater)?,
                AggKind::Min => extremum(group, arg()?, Ordering::Less)?,
                AggKind::AnyValue => match group.first() {
                    Some(r) => eval_scalar(arg()?, r)?,
                    None => Value::Null,
                },
                AggKind::Count => match &a.arg {
                    None => Value::Integer(group.len() as i64),
                    Some(e) => {
                        let mut n = 0;
                        for r in group {
                            if !eval_scalar(e, r)?.is_null() {
                                n += 1;
                            }
                        }
                        Value::Integer(n)
                    }
                },
                AggKind::Sum => {
                    let e = arg()?;
                    let mut acc: Option<i64> = None;
                    let mut is_duration = false;
                    for r in group {
                        let n = match eval_scalar(e, r)? {
                            Value::Null => continue,
                            Value::Integer(n) => n,
                            Value::Duration(d) => {
                                is_duration = true;
                                d.as_minutes()
                            }
                            other => return Err(Error::Internal(format!("SUM over {other:?}"))),
                        };
                        acc = Some(acc.unwrap_or(0).checked_add(n).ok_or_else(|| Error::validation("SUM overflow"))?);
                    }
                    match acc {
                        None => Value::Null,
                        Some(n) if is_duration => Value::Duration(Duration::minutes(n)?),
                        Some(n) => Value::Integer(n),
                    }
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ValueKind;

    fn prices(ps: &[i64]) -> Vec<Row> {
        ps.iter().map(|&p| Row(vec![Value::Integer(p)])).collect()
    }

    fn call(kind: AggKind) -> AggregateCall {
        AggregateCall { kind, arg: Some(ScalarExpr::Column(0)), result: ValueKind::Integer }
    }

    #[test]
    fn aggregate_functions() {
        assert_eq!(
            eval_aggregate_functions(&prices(&[2, 4, 5]), &[call(AggKind::Max)]).unwrap(),
            vec![Value::Integer(5)]
        );
        assert_eq!(
            eval_aggregate_functions(&prices(&[3, 1, 6]), &[call(AggKind::Sum)]).unwrap(),
            vec![Value::Integer(10)]
        );
        let count = AggregateCall { kind: AggKind::Count, arg: None, result: ValueKind::Integer };
        assert_eq!(eval_aggregate_functions(&prices(&[7]), &[count]).unwrap(), vec![Value::Integer(1)]);
        assert_eq!(
            eval_aggregate_functions(&prices(&[3, 1, 6]), &[call(AggKind::Min)]).unwrap(),
            vec![Value::Integer(1)]
        );
    }

    #[test]
    fn nulls_are_skipped() {
        let group = vec![Row(vec![Value::Null]), Row(vec![Value::Integer(4)])];
        let count_col =
            AggregateCall { kind: AggKind::Count, arg: Some(ScalarExpr::Column(0)), result: ValueKind::Integer };
        let out = eval_aggregate_functions(&group, &[call(AggKind::Max), call(AggKind::Sum), count_col]).unwrap();
        assert_eq!(out, vec![Value::Integer(4), Value::Integer(4), Value::Integer(1)]);
        let all_null = vec![Row(vec![Value::Null])];
        assert_eq!(eval_aggregate_functions(&all_null, &[call(AggKind::Sum)]).unwrap(), vec![Value::Null]);
    }

    #[test]
    fn three_valued_and() {
        let row = Row(vec![Value::Null, Value::Boolean(false), Value::Boolean(true)]);
        let and = |l, r| ScalarExpr::Binary {
            op: BinOp::And,
            left: Box::new(ScalarExpr::Column(l)),
            right: Box::new(ScalarExpr::Column(r)),
        };
        assert_eq!(eval_scalar(&and(0, 1), &row).unwrap(), Value::Boolean(false));
        assert_eq!(eval_scalar(&and(0, 2), &row).unwrap(), Value::Null);
        assert_eq!(eval_scalar(&and(2, 2), &row).unwrap(), Value::Boolean(true));
    }
}
