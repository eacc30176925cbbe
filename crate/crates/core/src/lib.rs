//! A small streaming SQL engine over time-varying relations.
//!
//! Sources are append-only logs of inserts, deletes and watermark advances,
//! stamped with processing time. Queries are ordinary SQL over the snapshot
//! of every source at a processing-time cursor, extended with windowing
//! table functions and an `EMIT` clause that chooses between the table view
//! and the changelog stream, optionally gated on watermarks or delayed.

pub mod error;
pub mod eventlog;
pub mod executor;
pub mod format;
pub mod model;
pub mod session;
pub mod sql;
pub mod time;
pub mod windowing;

pub use error::{Error, Result};
pub use eventlog::{
    parse_log, parse_schema_ddl, serialize_changelog, serialize_log, snapshot, Catalog, LogEntry, Payload, SourceLog,
};
pub use executor::{eval_relational, eval_stream, eval_table, EvalContext, SourceInputs};
pub use format::{format_changelog, format_table};
pub use model::{
    changelog_fold, is_complete, relation_diff, watermark_at, ChangelogRow, ColumnDef, DisplayFormat, Relation, Row,
    Schema, Value, ValueKind, VerState, WatermarkState,
};
pub use session::{run_script, ScriptReport, Session};
pub use sql::{parse_sql, validate, BoundQuery, EmitSpec};
pub use time::{Duration, Timestamp};
pub use windowing::{apply_window_tvf, hop_assign, tumble_assign, WindowSpec};
