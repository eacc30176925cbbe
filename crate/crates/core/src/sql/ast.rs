//! Syntax tree for the supported SQL subset. `Display` is the canonical
//! pretty-printer; printing and re-parsing yields an identical tree.

use std::fmt;

use crate::time::Duration;

/// Materialization directive from the trailing EMIT clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct EmitSpec {
    pub stream: bool,
    pub after_watermark: bool,
    pub delay: Option<Duration>,
}

impl EmitSpec {
    pub fn is_default(&self) -> bool {
        *self == EmitSpec::default()
    }
}

impl fmt::Display for EmitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EMIT")?;
        if self.stream {
            f.write_str(" STREAM")?;
        }
        let mut sep = " ";
        if let Some(d) = self.delay {
            write!(f, "{sep}AFTER DELAY INTERVAL '{}' MINUTES", d.as_minutes())?;
            sep = " AND ";
        }
        if self.after_watermark {
            write!(f, "{sep}AFTER WATERMARK")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub items: Vec<SelectItem>,
    pub from: Vec<FromItem>,
    pub selection: Option<Expr>,
    pub group_by: Vec<Expr>,
    pub emit: Option<EmitSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectItem {
    Wildcard,
    Expr { expr: Expr, alias: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FromItem {
    Table { name: String, alias: Option<String> },
    Subquery { query: Box<Query>, alias: Option<String> },
    Tvf(TvfCall),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TvfCall {
    pub name: String,
    pub args: Vec<TvfArg>,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TvfArg {
    /// `None` for positional arguments.
    pub name: Option<String>,
    pub value: ArgValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgValue {
    Table(String),
    Descriptor(String),
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Eq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    Plus,
    Minus,
    And,
}

impl BinOp {
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::And => 1,
            BinOp::Eq | BinOp::Lt | BinOp::LtEq | BinOp::Gt | BinOp::GtEq => 2,
            BinOp::Plus | BinOp::Minus => 3,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 2
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::LtEq => "<=",
            BinOp::Gt => ">",
            BinOp::GtEq => ">=",
            BinOp::Plus => "+",
            BinOp::Minus => "-",
            BinOp::And => "AND",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggFunc {
    Max,
    Min,
    Sum,
    Count,
}

impl AggFunc {
    pub fn lookup(name: &str) -> Option<Self> {
        Some(match name.to_ascii_uppercase().as_str() {
            "MAX" => AggFunc::Max,
            "MIN" => AggFunc::Min,
            "SUM" => AggFunc::Sum,
            "COUNT" => AggFunc::Count,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AggFunc::Max => "MAX",
            AggFunc::Min => "MIN",
            AggFunc::Sum => "SUM",
            AggFunc::Count => "COUNT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Column {
        qualifier: Option<String>,
        name: String,
    },
    Integer(i64),
    String(String),
    Interval(Duration),
    Binary {
        op: BinOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    /// `arg` is `None` for `COUNT(*)`.
    Aggregate {
        func: AggFunc,
        arg: Option<Box<Expr>>,
    },
}

impl Expr {
    pub fn column(qualifier: Option<&str>, name: &str) -> Self {
        Expr::Column { qualifier: qualifier.map(str::to_string), name: name.to_string() }
    }

    pub fn binary(op: BinOp, left: Expr, right: Expr) -> Self {
        Expr::Binary { op, left: Box::new(left), right: Box::new(right) }
    }

    pub fn contains_aggregate(&self) -> bool {
        match self {
            Expr::Aggregate { .. } => true,
            Expr::Binary { left, right, .. } => left.contains_aggregate() || right.contains_aggregate(),
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            _ => u8::MAX,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Column { qualifier: Some(q), name } => write!(f, "{q}.{name}"),
            Expr::Column { qualifier: None, name } => f.write_str(name),
            Expr::Integer(i) => write!(f, "{i}"),
            Expr::String(s) => write!(f, "'{}'", s.replace('\'', "''")),
            Expr::Interval(d) => write!(f, "INTERVAL '{}' MINUTES", d.as_minutes()),
            Expr::Aggregate { func, arg: Some(a) } => write!(f, "{}({a})", func.as_str()),
            Expr::Aggregate { func, arg: None } => write!(f, "{}(*)", func.as_str()),
            Expr::Binary { op, left, right } => {
                let p = op.precedence();
                if left.precedence() < p {
                    write!(f, "({left})")?;
                } else {
                    write!(f, "{left}")?;
                }
                write!(f, " {} ", op.as_str())?;
                if right.precedence() <= p {
                    write!(f, "({right})")
                } else {
                    write!(f, "{right}")
                }
            }
        }
    }
}

fn write_alias(f: &mut fmt::Formatter<'_>, alias: &Option<String>) -> fmt::Result {
    match alias {
        Some(a) => write!(f, " AS {a}"),
        None => Ok(()),
    }
}

impl fmt::Display for FromItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FromItem::Table { name, alias } => {
                f.write_str(name)?;
                write_alias(f, alias)
            }
            FromItem::Subquery { query, alias } => {
                write!(f, "({query})")?;
                write_alias(f, alias)
            }
            FromItem::Tvf(call) => {
                write!(f, "{}(", call.name)?;
                for (i, a) in call.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    if let Some(n) = &a.name {
                        write!(f, "{n} => ")?;
                    }
                    match &a.value {
                        ArgValue::Table(t) => write!(f, "TABLE({t})")?,
                        ArgValue::Descriptor(c) => write!(f, "DESCRIPTOR({c})")?,
                        ArgValue::Expr(e) => write!(f, "{e}")?,
                    }
                }
                f.write_str(")")?;
                write_alias(f, &call.alias)
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match item {
                SelectItem::Wildcard => f.write_str("*")?,
                SelectItem::Expr { expr, alias } => {
                    write!(f, "{expr}")?;
                    write_alias(f, alias)?;
                }
            }
        }
        f.write_str(" FROM ")?;
        for (i, item) in self.from.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        if let Some(w) = &self.selection {
            write!(f, " WHERE {w}")?;
        }
        if !self.group_by.is_empty() {
            f.write_str(" GROUP BY ")?;
            for (i, g) in self.group_by.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{g}")?;
            }
        }
        if let Some(e) = &self.emit {
            write!(f, " {e}")?;
        }
        Ok(())
    }
}
