//! Validated logical plans. Every node carries its output schema together
//! with per-column lineage: the source watermark an event-time column is
//! aligned with, whether it forwards an aggregate grouping key, and which
//! window bound it carries.

use std::fmt;

use crate::model::{ColumnDef, Schema, Value, ValueKind};
use crate::sql::ast::{AggFunc, BinOp, EmitSpec};
use crate::windowing::WindowSpec;

/// The source column whose watermark bounds an event-time column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WatermarkRef {
    pub source: String,
    pub column: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowBound {
    /// Identifies the TVF invocation within one query.
    pub tvf: usize,
    pub is_end: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanColumn {
    pub def: ColumnDef,
    /// Lower-cased table or alias qualifier used for `q.col` lookups.
    pub qualifier: Option<String>,
    /// Set exactly when `def.is_event_time`.
    pub watermark: Option<WatermarkRef>,
    pub group_key: bool,
    pub window: Option<WindowBound>,
}

impl PlanColumn {
    pub fn plain(def: ColumnDef) -> Self {
        PlanColumn { def, qualifier: None, watermark: None, group_key: false, window: None }
    }

    /// Strips event-time alignment and grouping lineage, keeping name and
    /// type.
    pub fn degraded(&self) -> Self {
        let mut def = self.def.clone();
        def.is_event_time = false;
        PlanColumn { def, qualifier: self.qualifier.clone(), watermark: None, group_key: false, window: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanSchema {
    pub columns: Vec<PlanColumn>,
    /// True only if every transitive source is bounded.
    pub bounded: bool,
}

impl PlanSchema {
    pub fn to_schema(&self) -> Schema {
        Schema { columns: self.columns.iter().map(|c| c.def.clone()).collect(), bounded: self.bounded }
    }

    pub fn requalified(mut self, qualifier: Option<&str>) -> Self {
        for c in &mut self.columns {
            c.qualifier = qualifier.map(str::to_ascii_lowercase);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScalarExpr {
    Column(usize),
    Literal(Value),
    Binary { op: BinOp, left: Box<ScalarExpr>, right: Box<ScalarExpr> },
}

/// Aggregate functions available to plans. `AnyValue` carries a column that
/// is functionally determined by the grouping key (a window bound whose
/// sibling bound is grouped on); it is never spelled in SQL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggKind {
    Max,
    Min,
    Sum,
    Count,
    AnyValue,
}

impl From<AggFunc> for AggKind {
    fn from(f: AggFunc) -> Self {
        match f {
            AggFunc::Max => AggKind::Max,
            AggFunc::Min => AggKind::Min,
            AggFunc::Sum => AggKind::Sum,
            AggFunc::Count => AggKind::Count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AggregateCall {
    pub kind: AggKind,
    /// `None` for `COUNT(*)`.
    pub arg: Option<ScalarExpr>,
    pub result: ValueKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlanOp {
    Scan {
        source: String,
    },
    WindowTvf {
        input: Box<LogicalPlan>,
        spec: WindowSpec,
        timecol: usize,
    },
    Filter {
        input: Box<LogicalPlan>,
        predicate: ScalarExpr,
    },
    Project {
        input: Box<LogicalPlan>,
        exprs: Vec<ScalarExpr>,
    },
    /// Theta join: cross product filtered by `predicate`.
    Join {
        left: Box<LogicalPlan>,
        right: Box<LogicalPlan>,
        predicate: Option<ScalarExpr>,
    },
    /// Output columns: the grouping keys, then one column per aggregate.
    Aggregate {
        input: Box<LogicalPlan>,
        keys: Vec<usize>,
        aggregates: Vec<AggregateCall>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalPlan {
    pub op: PlanOp,
    pub schema: PlanSchema,
}

impl LogicalPlan {
    pub fn children(&self) -> Vec<&LogicalPlan> {
        match &self.op {
            PlanOp::Scan { .. } => vec![],
            PlanOp::WindowTvf { input, .. }
            | PlanOp::Filter { input, .. }
            | PlanOp::Project { input, .. }
            | PlanOp::Aggregate { input, .. } => vec![input],
            PlanOp::Join { left, right, .. } => vec![left, right],
        }
    }

    /// Lower-cased names of every scanned source, deduplicated, in first-seen order.
    pub fn sources(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_sources(&mut out);
        out
    }

    fn collect_sources(&self, out: &mut Vec<String>) {
        if let PlanOp::Scan { source } = &self.op {
            if !out.contains(source) {
                out.push(source.clone());
            }
        }
        for c in self.children() {
            c.collect_sources(out);
        }
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        let cols: Vec<String> = self
            .schema
            .columns
            .iter()
            .map(|c| if c.def.is_event_time { format!("{}*", c.def.display) } else { c.def.display.clone() })
            .collect();
        let label = match &self.op {
            PlanOp::Scan { source } => format!("Scan {source}"),
            PlanOp::WindowTvf { spec, .. } => format!("WindowTvf {:?} dur={}", spec.kind, spec.dur.as_minutes()),
            PlanOp::Filter { .. } => "Filter".to_string(),
            PlanOp::Project { .. } => "Project".to_string(),
            PlanOp::Join { .. } => "Join".to_string(),
            PlanOp::Aggregate { keys, aggregates, .. } => format!("Aggregate keys={keys:?} aggs={}", aggregates.len()),
        };
        writeln!(f, "{pad}{label} [{}]", cols.join(", "))?;
        for c in self.children() {
            c.fmt_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for LogicalPlan {
    /// Indented operator tree; event-time columns are starred.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

/// A validated top-level query ready for evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundQuery {
    pub plan: LogicalPlan,
    pub emit: EmitSpec,
    /// Output columns identifying "the same event-time window" for revision
    /// numbering and delay timers: the forwarded grouping keys, or the whole
    /// row when the output carries none.
    pub window_key: Vec<usize>,
}

impl BoundQuery {
    pub fn output_schema(&self) -> Schema {
        self.plan.schema.to_schema()
    }
}
