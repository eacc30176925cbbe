//! Name resolution, typing and event-time propagation.
//!
//! Flag rules: a column reference forwarded verbatim (aliases included)
//! keeps its event-time flag and watermark mapping; any other expression
//! yields an unflagged column. Window TVFs add flagged `wstart`/`wend`
//! aligned with the time column's watermark. Joins forward both sides.
//! Aggregates keep flags only on grouping keys.

use crate::error::{Error, Result};
use crate::eventlog::Catalog;
use crate::model::{ColumnDef, DisplayFormat, Value, ValueKind};
use crate::sql::ast::{ArgValue, BinOp, Expr, FromItem, Query, SelectItem, TvfCall};
use crate::sql::plan::*;
use crate::time::Duration;
use crate::windowing::{window_output_schema, WindowKind, WindowSpec};

pub fn validate(query: &Query, catalog: &Catalog) -> Result<BoundQuery> {
    let mut binder = Binder { catalog, next_tvf: 0 };
    let plan = binder.query(query)?;
    let emit = query.emit.unwrap_or_default();
    if emit.after_watermark && !plan.schema.columns.iter().any(|c| c.watermark.is_some()) {
        return Err(Error::validation("EMIT AFTER WATERMARK requires an event-time column in the output"));
    }
    let mut window_key: Vec<usize> =
        plan.schema.columns.iter().enumerate().filter(|(_, c)| c.group_key).map(|(i, _)| i).collect();
    if window_key.is_empty() {
        window_key = (0..plan.schema.columns.len()).collect();
    }
    Ok(BoundQuery { plan, emit, window_key })
}

struct Binder<'a> {
    catalog: &'a Catalog,
    next_tvf: usize,
}

struct Typed {
    expr: ScalarExpr,
    /// `None` only for untyped NULL, which the grammar cannot produce.
    kind: ValueKind,
    format: DisplayFormat,
}

fn resolve(schema: &PlanSchema, qualifier: Option<&str>, name: &str) -> Result<usize> {
    let name_lc = name.to_ascii_lowercase();
    let q_lc = qualifier.map(str::to_ascii_lowercase);
    let hits: Vec<usize> = schema
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.def.name == name_lc && (q_lc.is_none() || c.qualifier == q_lc))
        .map(|(i, _)| i)
        .collect();
    let shown = match qualifier {
        Some(q) => format!("{q}.{name}"),
        None => name.to_string(),
    };
    match hits.as_slice() {
        [i] => Ok(*i),
        [] => Err(Error::validation(format!("unknown column '{shown}'"))),
        _ => Err(Error::validation(format!("ambiguous column reference '{shown}'"))),
    }
}

fn binary_kind(op: BinOp, l: ValueKind, r: ValueKind) -> Option<ValueKind> {
    use ValueKind::*;
    match op {
        BinOp::And => (l == Boolean && r == Boolean).then_some(Boolean),
        _ if op.is_comparison() => (l == r).then_some(Boolean),
        BinOp::Plus => match (l, r) {
            (Timestamp, Duration) | (Duration, Timestamp) => Some(Timestamp),
            (Integer, Integer) => Some(Integer),
            (Duration, Duration) => Some(Duration),
            _ => None,
        },
        BinOp::Minus => match (l, r) {
            (Timestamp, Duration) => Some(Timestamp),
            (Integer, Integer) => Some(Integer),
            (Duration, Duration) => Some(Duration),
            _ => None,
        },
        _ => None,
    }
}

fn bind_scalar(expr: &Expr, schema: &PlanSchema) -> Result<Typed> {
    Ok(match expr {
        Expr::Column { qualifier, name } => {
            let i = resolve(schema, qualifier.as_deref(), name)?;
            let def = &schema.columns[i].def;
            Typed { expr: ScalarExpr::Column(i), kind: def.kind, format: def.format }
        }
        Expr::Integer(n) => Typed {
            expr: ScalarExpr::Literal(Value::Integer(*n)),
            kind: ValueKind::Integer,
            format: DisplayFormat::Plain,
        },
        Expr::String(s) => Typed {
            expr: ScalarExpr::Literal(Value::Text(s.clone())),
            kind: ValueKind::Text,
            format: DisplayFormat::Plain,
        },
        Expr::Interval(d) => Typed {
            expr: ScalarExpr::Literal(Value::Duration(*d)),
            kind: ValueKind::Duration,
            format: DisplayFormat::Plain,
        },
        Expr::Binary { op, left, right } => {
            let l = bind_scalar(left, schema)?;
            let r = bind_scalar(right, schema)?;
            let kind = binary_kind(*op, l.kind, r.kind).ok_or_else(|| {
                Error::validation(format!("type mismatch: {} {} {} in '{expr}'", l.kind, op.as_str(), r.kind))
            })?;
            let format = if kind == ValueKind::Integer
                && (l.format == DisplayFormat::Dollar || r.format == DisplayFormat::Dollar)
            {
                DisplayFormat::Dollar
            } else {
                DisplayFormat::Plain
            };
            Typed {
                expr: ScalarExpr::Binary { op: *op, left: Box::new(l.expr), right: Box::new(r.expr) },
                kind,
                format,
            }
        }
        Expr::Aggregate { .. } => {
            return Err(Error::validation(format!("aggregate '{expr}' not allowed here")));
        }
    })
}

fn bind_predicate(expr: &Expr, schema: &PlanSchema) -> Result<ScalarExpr> {
    let t = bind_scalar(expr, schema)?;
    if t.kind != ValueKind::Boolean {
        return Err(Error::validation(format!("predicate '{expr}' is {}, not BOOLEAN", t.kind)));
    }
    Ok(t.expr)
}

/// Output column for a projected expression: verbatim column references keep
/// all lineage, everything else is a fresh unflagged column.
fn project_column(expr: &Expr, typed: &Typed, input: &PlanSchema, alias: Option<&str>, ordinal: usize) -> PlanColumn {
    let mut col = match typed.expr {
        ScalarExpr::Column(i) => input.columns[i].clone(),
        _ => {
            let name = match expr {
                Expr::Aggregate { func, .. } => func.as_str().to_ascii_lowercase(),
                _ => format!("expr{ordinal}"),
            };
            PlanColumn::plain(ColumnDef::new(&name, typed.kind).with_format(typed.format))
        }
    };
    match alias {
        Some(a) => {
            col.def.name = a.to_ascii_lowercase();
            col.def.display = a.to_string();
        }
        None => col.def.name = col.def.display.to_ascii_lowercase(),
    }
    col.qualifier = None;
    col
}

impl Binder<'_> {
    fn query(&mut self, q: &Query) -> Result<LogicalPlan> {
        let input = self.bind_from(q)?;
        let grouped = !q.group_by.is_empty()
            || q.items.iter().any(|i| matches!(i, SelectItem::Expr { expr, .. } if expr.contains_aggregate()));
        if grouped {
            self.grouped_select(q, input)
        } else {
            self.plain_select(q, input)
        }
    }

    fn bind_from(&mut self, q: &Query) -> Result<LogicalPlan> {
        let mut items = q.from.iter().map(|f| self.bind_from_item(f));
        let mut plan = items.next().expect("parser guarantees a FROM item")?;
        for right in items {
            let right = right?;
            let mut columns = plan.schema.columns.clone();
            columns.extend(right.schema.columns.iter().cloned());
            let schema = PlanSchema { columns, bounded: plan.schema.bounded && right.schema.bounded };
            plan = LogicalPlan {
                op: PlanOp::Join { left: Box::new(plan), right: Box::new(right), predicate: None },
                schema,
            };
        }
        if let Some(w) = &q.selection {
            if w.contains_aggregate() {
                return Err(Error::validation("aggregates are not allowed in WHERE"));
            }
            let pred = bind_predicate(w, &plan.schema)?;
            plan = match plan.op {
                PlanOp::Join { left, right, predicate: None } => {
                    LogicalPlan { op: PlanOp::Join { left, right, predicate: Some(pred) }, schema: plan.schema }
                }
                op => {
                    let schema = plan.schema.clone();
                    LogicalPlan {
                        op: PlanOp::Filter {
                            input: Box::new(LogicalPlan { op, schema: plan.schema }),
                            predicate: pred,
                        },
                        schema,
                    }
                }
            };
        }
        Ok(plan)
    }

    fn scan(&self, name: &str, qualifier: Option<&str>) -> Result<LogicalPlan> {
        let log = self.catalog.get(name).ok_or_else(|| Error::validation(format!("unknown table '{name}'")))?;
        let source = log.name.to_ascii_lowercase();
        let columns = log
            .schema
            .columns
            .iter()
            .map(|def| PlanColumn {
                def: def.clone(),
                qualifier: qualifier.map(str::to_ascii_lowercase),
                watermark: def.is_event_time.then(|| WatermarkRef { source: source.clone(), column: def.name.clone() }),
                group_key: false,
                window: None,
            })
            .collect();
        Ok(LogicalPlan { op: PlanOp::Scan { source }, schema: PlanSchema { columns, bounded: log.schema.bounded } })
    }

    fn bind_from_item(&mut self, item: &FromItem) -> Result<LogicalPlan> {
        match item {
            FromItem::Table { name, alias } => self.scan(name, Some(alias.as_deref().unwrap_or(name))),
            FromItem::Subquery { query, alias } => {
                let mut plan = self.query(query)?;
                plan.schema = plan.schema.requalified(alias.as_deref());
                Ok(plan)
            }
            FromItem::Tvf(call) => self.tvf(call),
        }
    }

    fn tvf(&mut self, call: &TvfCall) -> Result<LogicalPlan> {
        let is_hop = match call.name.to_ascii_lowercase().as_str() {
            "tumble" => false,
            "hop" => true,
            _ => return Err(Error::validation(format!("unknown table function '{}'", call.name))),
        };
        let params: &[&str] = if is_hop {
            &["data", "timecol", "dur", "hopsize", "offset"]
        } else {
            &["data", "timecol", "dur", "offset"]
        };
        let mut slots: Vec<Option<&ArgValue>> = vec![None; params.len()];
        for (pos, arg) in call.args.iter().enumerate() {
            let idx = match &arg.name {
                Some(n) => params
                    .iter()
                    .position(|p| p.eq_ignore_ascii_case(n))
                    .ok_or_else(|| Error::validation(format!("{} has no parameter '{n}'", call.name)))?,
                None if pos < params.len() => pos,
                None => return Err(Error::validation(format!("too many arguments to {}", call.name))),
            };
            if slots[idx].replace(&arg.value).is_some() {
                return Err(Error::validation(format!("parameter '{}' given twice", params[idx])));
            }
        }
        let required = params.len() - 1;
        if let Some(i) = slots[..required].iter().position(Option::is_none) {
            return Err(Error::validation(format!("{} requires parameter '{}'", call.name, params[i])));
        }
        let table = match slots[0] {
            Some(ArgValue::Table(t)) => t,
            _ => return Err(Error::validation("parameter 'data' must be TABLE(<name>)")),
        };
        let input = self.scan(table, Some(table))?;
        let timecol_name = match slots[1] {
            Some(ArgValue::Descriptor(c)) => c,
            _ => return Err(Error::validation("parameter 'timecol' must be DESCRIPTOR(<column>)")),
        };
        let timecol = resolve(&input.schema, None, timecol_name)?;
        let tc = &input.schema.columns[timecol];
        if !tc.def.is_event_time {
            return Err(Error::validation(format!("'{}' is not a watermarked event-time column", tc.def.display)));
        }
        let duration = |slot: Option<&ArgValue>, what: &str| -> Result<Option<Duration>> {
            match slot {
                None => Ok(None),
                Some(ArgValue::Expr(Expr::Interval(d))) => Ok(Some(*d)),
                Some(_) => Err(Error::validation(format!("parameter '{what}' must be an INTERVAL literal"))),
            }
        };
        let dur = duration(slots[2], "dur")?.expect("required");
        let offset = duration(slots[params.len() - 1], "offset")?.unwrap_or(Duration::ZERO);
        let mut spec = WindowSpec::tumble(&tc.def.name, dur).with_offset(offset);
        if is_hop {
            spec.kind = WindowKind::Hop { hopsize: duration(slots[3], "hopsize")?.expect("required") };
        }
        spec.validate()?;

        let tvf = self.next_tvf;
        self.next_tvf += 1;
        let qualifier = call.alias.as_deref().map(str::to_ascii_lowercase);
        let defs = window_output_schema(&input.schema.to_schema()).columns;
        let mut columns = Vec::with_capacity(defs.len());
        for (i, def) in defs.into_iter().enumerate() {
            columns.push(if i < 2 {
                PlanColumn {
                    def,
                    qualifier: qualifier.clone(),
                    watermark: tc.watermark.clone(),
                    group_key: false,
                    window: Some(WindowBound { tvf, is_end: i == 1 }),
                }
            } else {
                PlanColumn { qualifier: qualifier.clone(), ..input.schema.columns[i - 2].clone() }
            });
        }
        let schema = PlanSchema { columns, bounded: input.schema.bounded };
        Ok(LogicalPlan { op: PlanOp::WindowTvf { input: Box::new(input), spec, timecol }, schema })
    }

    fn plain_select(&mut self, q: &Query, input: LogicalPlan) -> Result<LogicalPlan> {
        let mut exprs = Vec::new();
        let mut columns = Vec::new();
        for item in &q.items {
            match item {
                SelectItem::Wildcard => {
                    for (i, c) in input.schema.columns.iter().enumerate() {
                        exprs.push(ScalarExpr::Column(i));
                        columns.push(PlanColumn { qualifier: None, ..c.clone() });
                    }
                }
                SelectItem::Expr { expr, alias } => {
                    let typed = bind_scalar(expr, &input.schema)?;
                    columns.push(project_column(expr, &typed, &input.schema, alias.as_deref(), columns.len()));
                    exprs.push(typed.expr);
                }
            }
        }
        let schema = PlanSchema { columns, bounded: input.schema.bounded };
        Ok(LogicalPlan { op: PlanOp::Project { input: Box::new(input), exprs }, schema })
    }

    fn grouped_select(&mut self, q: &Query, input: LogicalPlan) -> Result<LogicalPlan> {
        let mut keys = Vec::new();
        for g in &q.group_by {
            match g {
                Expr::Column { qualifier, name } => {
                    let i = resolve(&input.schema, qualifier.as_deref(), name)?;
                    if !keys.contains(&i) {
                        keys.push(i);
                    }
                }
                other => {
                    return Err(Error::validation(format!("GROUP BY supports column references only, found '{other}'")))
                }
            }
        }
        if !input.schema.bounded && !keys.iter().any(|&k| input.schema.columns[k].def.is_event_time) {
            return Err(Error::validation("unbounded GROUP BY requires an event-time key"));
        }

        let mut agg = AggBuilder { input: &input.schema, keys: &keys, calls: Vec::new(), columns: Vec::new() };
        let mut rewritten = Vec::new();
        for item in &q.items {
            match item {
                SelectItem::Wildcard => return Err(Error::validation("SELECT * is not allowed in a grouped query")),
                SelectItem::Expr { expr, alias } => rewritten.push((agg.rewrite(expr)?, alias.clone())),
            }
        }

        let mut out_columns: Vec<PlanColumn> = keys
            .iter()
            .map(|&k| {
                let c = &input.schema.columns[k];
                PlanColumn { group_key: true, ..c.clone() }
            })
            .collect();
        out_columns.extend(agg.columns);
        let aggregates = agg.calls;
        let agg_schema = PlanSchema { columns: out_columns, bounded: input.schema.bounded };
        let agg_plan =
            LogicalPlan { op: PlanOp::Aggregate { input: Box::new(input), keys, aggregates }, schema: agg_schema };

        let mut exprs = Vec::new();
        let mut columns = Vec::new();
        for (expr, alias) in rewritten {
            let typed = bind_scalar(&expr, &agg_plan.schema)?;
            columns.push(project_column(&expr, &typed, &agg_plan.schema, alias.as_deref(), columns.len()));
            exprs.push(typed.expr);
        }
        let schema = PlanSchema { columns, bounded: agg_plan.schema.bounded };
        Ok(LogicalPlan { op: PlanOp::Project { input: Box::new(agg_plan), exprs }, schema })
    }
}

/// Collects aggregate calls and functionally dependent columns of a grouped
/// select list, rewriting each item into a reference over the Aggregate's
/// output (keys first, then aggregates, named `#k<i>` / `#a<i>` internally).
struct AggBuilder<'a> {
    input: &'a PlanSchema,
    keys: &'a [usize],
    calls: Vec<AggregateCall>,
    columns: Vec<PlanColumn>,
}

impl AggBuilder<'_> {
    fn key_ref(&self, pos: usize) -> Expr {
        let c = &self.input.columns[self.keys[pos]];
        Expr::Column { qualifier: c.qualifier.clone(), name: c.def.name.clone() }
    }

    fn agg_ref(&self, pos: usize) -> Expr {
        Expr::Column { qualifier: Some("#agg".into()), name: self.columns[pos].def.name.clone() }
    }

    fn push(&mut self, call: AggregateCall, mut col: PlanColumn) -> usize {
        if let Some(i) = self.calls.iter().position(|c| *c == call) {
            return i;
        }
        // Unique internal name; display keeps the user-facing spelling.
        col.def.name = format!("{}#{}", col.def.name, self.calls.len());
        col.qualifier = Some("#agg".into());
        self.calls.push(call);
        self.columns.push(col);
        self.calls.len() - 1
    }

    fn rewrite(&mut self, expr: &Expr) -> Result<Expr> {
        Ok(match expr {
            Expr::Aggregate { func, arg } => {
                let (arg_expr, kind, display, format) = match arg {
                    None => (None, ValueKind::Integer, "count".to_string(), DisplayFormat::Plain),
                    Some(a) => {
                        if a.contains_aggregate() {
                            return Err(Error::validation(format!("nested aggregate in '{expr}'")));
                        }
                        let t = bind_scalar(a, self.input)?;
                        let display = match t.expr {
                            ScalarExpr::Column(i) => self.input.columns[i].def.display.clone(),
                            _ => func.as_str().to_ascii_lowercase(),
                        };
                        (Some(t.expr), t.kind, display, t.format)
                    }
                };
                let kind_fn = AggKind::from(*func);
                let result = match kind_fn {
                    AggKind::Count => ValueKind::Integer,
                    AggKind::Sum if !matches!(kind, ValueKind::Integer | ValueKind::Duration) => {
                        return Err(Error::validation(format!("SUM over non-numeric {kind}")));
                    }
                    _ => kind,
                };
                let format = if kind_fn == AggKind::Count { DisplayFormat::Plain } else { format };
                let display = if kind_fn == AggKind::Count && arg.is_none() { "count".into() } else { display };
                let col = PlanColumn::plain(ColumnDef::new(&display, result).with_format(format));
                let pos = self.push(AggregateCall { kind: kind_fn, arg: arg_expr, result }, col);
                self.agg_ref(pos)
            }
            Expr::Column { qualifier, name } => {
                let i = resolve(self.input, qualifier.as_deref(), name)?;
                if let Some(pos) = self.keys.iter().position(|&k| k == i) {
                    return Ok(self.key_ref(pos));
                }
                let c = &self.input.columns[i];
                let dependent = c.window.is_some_and(|w| {
                    self.keys.iter().any(|&k| self.input.columns[k].window.is_some_and(|kw| kw.tvf == w.tvf))
                });
                if !dependent {
                    return Err(Error::validation(format!("column '{expr}' must appear in GROUP BY or an aggregate")));
                }
                let call =
                    AggregateCall { kind: AggKind::AnyValue, arg: Some(ScalarExpr::Column(i)), result: c.def.kind };
                let pos = self.push(call, c.degraded());
                self.agg_ref(pos)
            }
            Expr::Binary { op, left, right } => Expr::binary(*op, self.rewrite(left)?, self.rewrite(right)?),
            lit => lit.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sql::parser::parse_sql;

    const DDL: &str = "CREATE STREAM Bid (bidtime TIMESTAMP EVENTTIME, price INT FORMAT '$', item STRING);";

    fn catalog(ddl: &str) -> Catalog {
        Catalog::from_ddl(ddl).unwrap()
    }

    fn bind(sql: &str, ddl: &str) -> Result<BoundQuery> {
        validate(&parse_sql(sql).unwrap(), &catalog(ddl))
    }

    #[test]
    fn unbounded_group_by_needs_event_time_key() {
        let e = bind("SELECT item, SUM(price) FROM Bid GROUP BY item;", DDL).unwrap_err();
        assert_eq!(e.to_string(), "unbounded GROUP BY requires an event-time key");
        let table = DDL.replace("STREAM", "TABLE");
        let q = bind("SELECT item, SUM(price) FROM Bid GROUP BY item;", &table).unwrap();
        assert_eq!(q.plan.schema.columns.len(), 2);
        assert_eq!(q.window_key, vec![0]);
        assert!(bind("SELECT bidtime, COUNT(*) FROM Bid GROUP BY bidtime;", DDL).is_ok());
    }

    #[test]
    fn name_errors() {
        assert_eq!(bind("SELECT nope FROM Bid", DDL).unwrap_err().to_string(), "unknown column 'nope'");
        assert_eq!(bind("SELECT * FROM Nope", DDL).unwrap_err().to_string(), "unknown table 'Nope'");
        let e = bind("SELECT price FROM Bid a, Bid b", DDL).unwrap_err();
        assert_eq!(e.to_string(), "ambiguous column reference 'price'");
        assert!(bind("SELECT a.price FROM Bid a, Bid b", DDL).is_ok());
    }

    #[test]
    fn type_errors() {
        let e = bind("SELECT * FROM Bid WHERE price = bidtime", DDL).unwrap_err();
        assert!(e.to_string().starts_with("type mismatch"), "{e}");
        assert!(bind("SELECT * FROM Bid WHERE price", DDL).is_err());
        assert!(bind("SELECT SUM(item) FROM Bid GROUP BY bidtime", DDL).is_err());
        assert!(bind("SELECT * FROM Bid WHERE bidtime < bidtime + INTERVAL '1' MINUTE", DDL).is_ok());
    }

    #[test]
    fn flags_follow_verbatim_forwarding() {
        let q = bind("SELECT bidtime, bidtime AS t, bidtime + INTERVAL '1' MINUTE AS later FROM Bid", DDL).unwrap();
        let flags: Vec<bool> = q.plan.schema.columns.iter().map(|c| c.def.is_event_time).collect();
        assert_eq!(flags, [true, true, false]);
        assert!(q.plan.schema.columns[2].watermark.is_none());
    }

    #[test]
    fn aggregate_drops_flag_on_non_keys() {
        let q = bind(
            "SELECT MAX(wstart), wend, SUM(price) FROM Tumble(data => TABLE(Bid), timecol => DESCRIPTOR(bidtime), dur => INTERVAL '10' MINUTES) GROUP BY wend",
            DDL,
        )
        .unwrap();
        let cols: Vec<(&str, bool)> =
            q.plan.schema.columns.iter().map(|c| (c.def.display.as_str(), c.def.is_event_time)).collect();
        assert_eq!(cols, [("wstart", false), ("wend", true), ("price", false)]);
        assert_eq!(q.plan.schema.columns[2].def.format, DisplayFormat::Dollar);
        assert_eq!(q.window_key, vec![1]);
    }

    #[test]
    fn tvf_requires_event_time_column() {
        let ddl = "CREATE STREAM S (ts TIMESTAMP, v INT);";
        let e = bind("SELECT * FROM Tumble(TABLE(S), DESCRIPTOR(ts), INTERVAL '10' MINUTES)", ddl).unwrap_err();
        assert!(e.to_string().contains("not a watermarked event-time column"), "{e}");
        let e = bind("SELECT * FROM Hop(TABLE(Bid), DESCRIPTOR(bidtime), INTERVAL '10' MINUTES)", DDL).unwrap_err();
        assert!(e.to_string().contains("requires parameter 'hopsize'"), "{e}");
        let q = bind(
            "SELECT * FROM Hop(TABLE(Bid), DESCRIPTOR(bidtime), INTERVAL '10' MINUTES, INTERVAL '5' MINUTES)",
            DDL,
        )
        .unwrap();
        let names: Vec<&str> = q.plan.schema.columns.iter().map(|c| c.def.name.as_str()).collect();
        assert_eq!(names, ["wstart", "wend", "bidtime", "price", "item"]);
    }

    #[test]
    fn non_grouped_column_rejected() {
        let e = bind(
            "SELECT item, wend FROM Tumble(data => TABLE(Bid), timecol => DESCRIPTOR(bidtime), dur => INTERVAL '10' MINUTES) GROUP BY wend",
            DDL,
        )
        .unwrap_err();
        assert!(e.to_string().contains("must appear in GROUP BY"), "{e}");
    }

    #[test]
    fn after_watermark_needs_flagged_output() {
        let e = bind("SELECT price FROM Bid EMIT AFTER WATERMARK", DDL).unwrap_err();
        assert!(e.to_string().contains("requires an event-time column"), "{e}");
    }

    #[test]
    fn validation_is_deterministic() {
        let sql = "SELECT MAX(wstart), wend, SUM(price) FROM Tumble(data => TABLE(Bid), timecol => DESCRIPTOR(bidtime), dur => INTERVAL '10' MINUTES) GROUP BY wend";
        assert_eq!(bind(sql, DDL).unwrap(), bind(sql, DDL).unwrap());
    }
}
