//! Browser bindings: evaluate a query over a pasted log at a chosen
//! processing time, render its changelog, and show window assignment.

use tvr_core::{
    eval_stream, eval_table, format_changelog, format_table, hop_assign, parse_sql, tumble_assign, validate, Catalog,
    Duration, EvalContext, Timestamp,
};
use wasm_bindgen::prelude::*;

fn load(ddl: &str, log: &str) -> Result<Catalog, String> {
    let mut catalog = Catalog::from_ddl(ddl).map_err(|e| e.to_string())?;
    let name = catalog.sources().next().map(|s| s.name.clone()).ok_or("the schema declares no source")?;
    catalog.attach_log(&name, log).map_err(|e| e.to_string())?;
    Ok(catalog)
}

fn minutes(m: i64) -> Result<Duration, String> {
    Duration::minutes(m).map_err(|e| e.to_string())
}

/// Distinct processing times of the log, comma separated.
pub fn timeline_text(ddl: &str, log: &str) -> Result<String, String> {
    let catalog = load(ddl, log)?;
    let mut times: Vec<Timestamp> = catalog.sources().flat_map(|s| s.entries.iter().map(|e| e.ptime)).collect();
    times.sort();
    times.dedup();
    Ok(times.iter().map(Timestamp::to_string).collect::<Vec<_>>().join(","))
}

/// Table view at `cursor`. A query with `EMIT STREAM` renders its changelog
/// up to the cursor instead.
pub fn query_text(ddl: &str, log: &str, sql: &str, cursor: &str) -> Result<String, String> {
    let catalog = load(ddl, log)?;
    let cursor: Timestamp = cursor.parse().map_err(|e: tvr_core::Error| e.to_string())?;
    let q = validate(&parse_sql(sql).map_err(|e| e.to_string())?, &catalog).map_err(|e| e.to_string())?;
    let ctx = EvalContext::new(&catalog, cursor);
    if q.emit.stream {
        let rows = eval_stream(&q, &ctx, Timestamp::BOTTOM, cursor).map_err(|e| e.to_string())?;
        let schema = q.output_schema();
        return Ok(format_changelog(&rows, &schema, !schema.bounded));
    }
    eval_table(&q, &ctx).map(|r| format_table(&r)).map_err(|e| e.to_string())
}

/// Windows containing `t`: one for tumbling (`hop` of 0), several for hopping.
pub fn windows_text(t: &str, dur: i64, hop: i64, offset: i64) -> Result<String, String> {
    let t: Timestamp = t.parse().map_err(|e: tvr_core::Error| e.to_string())?;
    let windows = if hop == 0 {
        vec![tumble_assign(t, minutes(dur)?, minutes(offset)?).map_err(|e| e.to_string())?]
    } else {
        hop_assign(t, minutes(dur)?, minutes(hop)?, minutes(offset)?).map_err(|e| e.to_string())?
    };
    Ok(windows.iter().map(|(s, e)| format!("[{s}, {e})")).collect::<Vec<_>>().join("\n"))
}

#[wasm_bindgen]
pub fn timeline(ddl: &str, log: &str) -> Result<String, JsValue> {
    timeline_text(ddl, log).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn query(ddl: &str, log: &str, sql: &str, cursor: &str) -> Result<String, JsValue> {
    query_text(ddl, log, sql, cursor).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn windows(t: &str, dur: i32, hop: i32, offset: i32) -> Result<String, JsValue> {
    windows_text(t, dur.into(), hop.into(), offset.into()).map_err(|e| JsValue::from_str(&e))
}
