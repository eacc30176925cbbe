//! Interactive session state: a catalog, a processing-time cursor and the
//! most recent stream query. Commands are either dot-commands or SQL
//! statements terminated by `;`, possibly spanning several lines.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eventlog::{serialize_changelog, Catalog};
use crate::executor::{eval_stream, eval_table, EvalContext};
use crate::format::{format_changelog, format_table};
use crate::model::{ChangelogRow, Schema};
use crate::sql::{parse_sql, validate, BoundQuery};
use crate::time::Timestamp;

const HELP: &str = "\
.load <schema.sql> <name>=<file.log> ...   load sources
.at <H:MM>                                 move the processing-time cursor
.tail <from> <to>                          replay the last stream query between two times
.capture <file>                            write the last changelog as a log file
.quit                                      end the session
";

#[derive(Debug, Default)]
pub struct Session {
    catalog: Catalog,
    cursor: Timestamp,
    base_dir: PathBuf,
    pending: String,
    last_stream: Option<BoundQuery>,
    last_changelog: Option<(Vec<ChangelogRow>, Schema)>,
    finished: bool,
}

impl Session {
    pub fn new() -> Self {
        Session { base_dir: PathBuf::from("."), ..Default::default() }
    }

    /// Starts with `catalog` loaded and the cursor at its horizon.
    pub fn with_catalog(catalog: Catalog) -> Self {
        let mut s = Session::new();
        s.cursor = catalog.horizon().unwrap_or(Timestamp::BOTTOM);
        s.catalog = catalog;
        s
    }

    /// Directory that relative paths in `.load` and `.capture` resolve against.
    pub fn set_base_dir(&mut self, dir: impl Into<PathBuf>) {
        self.base_dir = dir.into();
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn cursor(&self) -> Timestamp {
        self.cursor
    }

    pub fn set_cursor(&mut self, t: Timestamp) {
        self.cursor = t;
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// True while a SQL statement is only partly entered.
    pub fn is_pending(&self) -> bool {
        !self.pending.is_empty()
    }

    pub fn prompt(&self) -> String {
        if self.catalog.is_empty() {
            "> ".to_string()
        } else {
            format!("{}> ", self.cursor)
        }
    }

    /// Feeds one input line. Returns the output it produces, which is empty
    /// while a statement is still being accumulated. A failed command leaves
    /// the catalog and cursor as they were.
    pub fn run_command(&mut self, line: &str) -> Result<String> {
        let trimmed = line.trim();
        if self.pending.is_empty() {
            if trimmed.is_empty() || trimmed.starts_with("--") {
                return Ok(String::new());
            }
            if let Some(cmd) = trimmed.strip_prefix('.') {
                return self.dot_command(cmd);
            }
        }
        self.pending.push_str(line);
        self.pending.push('\n');
        if !trimmed.ends_with(';') {
            return Ok(String::new());
        }
        let sql = std::mem::take(&mut self.pending);
        self.statement(&sql)
    }

    fn resolve(&self, path: &str) -> PathBuf {
        self.base_dir.join(path)
    }

    fn read(&self, path: &str) -> Result<String> {
        let p = self.resolve(path);
        fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
    }

    fn dot_command(&mut self, cmd: &str) -> Result<String> {
        let mut words = cmd.split_whitespace();
        let name = words.next().unwrap_or("");
        let args: Vec<&str> = words.collect();
        match (name, args.as_slice()) {
            ("load", [schema, logs @ ..]) => {
                let mut catalog = Catalog::from_ddl(&self.read(schema)?)?;
                for spec in logs {
                    let (source, file) = spec
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected <name>=<file.log>, found '{spec}'")))?;
                    catalog.attach_log(source, &self.read(file)?)?;
                }
                self.cursor = catalog.horizon().unwrap_or(Timestamp::BOTTOM);
                self.catalog = catalog;
                self.last_stream = None;
                self.last_changelog = None;
                let names: Vec<&str> = self.catalog.sources().map(|s| s.name.as_str()).collect();
                Ok(format!("loaded {}\n", names.join(", ")))
            }
            ("at", [t]) => {
                self.cursor = t.parse()?;
                Ok(String::new())
            }
            ("tail", [from, to]) => {
                let (from, to): (Timestamp, Timestamp) = (from.parse()?, to.parse()?);
                if from > to {
                    return Err(Error::Parse(format!("empty range {from} .. {to}")));
                }
                let q = self.last_stream.clone().ok_or_else(|| Error::validation("no stream query to tail"))?;
                self.stream(&q, from, to)
            }
            ("capture", [file]) => {
                let (rows, schema) =
                    self.last_changelog.as_ref().ok_or_else(|| Error::validation("no changelog to capture"))?;
                let p = self.resolve(file);
                fs::write(&p, serialize_changelog(rows, schema))
                    .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                Ok(format!("wrote {} rows to {file}\n", rows.len()))
            }
            ("quit" | "exit", []) => {
                self.finished = true;
                Ok(String::new())
            }
            ("help", []) => Ok(HELP.to_string()),
            ("load" | "at" | "tail" | "capture" | "quit" | "exit" | "help", _) => {
                Err(Error::Parse(format!("wrong arguments for .{name}; try .help")))
            }
            _ => Err(Error::Parse(format!("unknown command '.{name}'"))),
        }
    }

    fn statement(&mut self, sql: &str) -> Result<String> {
        let q = validate(&parse_sql(sql)?, &self.catalog)?;
        if q.emit.stream {
            let to = self.catalog.horizon().unwrap_or(Timestamp::BOTTOM);
            let out = self.stream(&q, Timestamp::BOTTOM, to)?;
            self.last_stream = Some(q);
            return Ok(out);
        }
        let rel = eval_table(&q, &EvalContext::new(&self.catalog, self.cursor))?;
        Ok(format_table(&rel))
    }

    fn stream(&mut self, q: &BoundQuery, from: Timestamp, to: Timestamp) -> Result<String> {
        let ctx = EvalContext::new(&self.catalog, self.cursor);
        let rows = eval_stream(q, &ctx, from, to)?;
        let schema = q.output_schema();
        let out = format_changelog(&rows, &schema, !schema.bounded);
        self.last_changelog = Some((rows, schema));
        Ok(out)
    }

    /// Runs every line of `script`, echoing each input line after the prompt
    /// and interleaving its output. Errors appear as `error: ...` lines and do
    /// not stop the script.
    pub fn transcript(&mut self, script: &str) -> String {
        let mut out = String::new();
        for line in script.lines() {
            if self.finished {
                break;
            }
            if self.pending.is_empty() {
                if line.trim().is_empty() {
                    continue;
                }
                if line.trim_start().starts_with("--") {
                    out.push_str(line.trim_end());
                    out.push('\n');
                    continue;
                }
                out.push_str(&self.prompt());
            } else {
                out.push_str(&" ".repeat(self.prompt().len()));
            }
            out.push_str(line.trim_end());
            out.push('\n');
            match self.run_command(line) {
                Ok(text) => out.push_str(&text),
                Err(e) => {
                    self.pending.clear();
                    out.push_str(&format!("error: {e}\n"));
                }
            }
        }
        if self.is_pending() {
            self.pending.clear();
            out.push_str("error: unterminated statement at end of script\n");
        }
        out
    }
}

/// Outcome of running a script against an expected transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptReport {
    pub transcript: String,
    /// First differing line: 1-based number, expected text, actual text.
    pub divergence: Option<(usize, String, String)>,
}

impl ScriptReport {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

fn first_divergence(expected: &str, actual: &str) -> Option<(usize, String, String)> {
    if expected == actual {
        return None;
    }
    let mut e = expected.split_inclusive('\n');
    let mut a = actual.split_inclusive('\n');
    let mut n = 1;
    loop {
        match (e.next(), a.next()) {
            (Some(x), Some(y)) if x == y => n += 1,
            (x, y) => {
                let show =
                    |s: Option<&str>| s.map_or("<end of output>".to_string(), |s| s.trim_end_matches('\n').to_string());
                return Some((n, show(x), show(y)));
            }
        }
    }
}

/// Runs `script` in `session`, resolving relative paths against the
/// script's directory, and compares the transcript with `expected`
/// byte for byte.
pub fn run_script(session: &mut Session, script: &Path, expected: &Path) -> Result<ScriptReport> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())));
    let text = read(script)?;
    let expected = read(expected)?;
    if let Some(dir) = script.parent() {
        session.set_base_dir(dir);
    }
    let transcript = session.transcript(&text);
    let divergence = first_divergence(&expected, &transcript);
    Ok(ScriptReport { transcript, divergence })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_reports_first_line() {
        assert_eq!(first_divergence("a\nb\n", "a\nb\n"), None);
        assert_eq!(first_divergence("a\nb\n", "a\nc\n"), Some((2, "b".into(), "c".into())));
        assert_eq!(first_divergence("a\n", "a\nx\n"), Some((2, "<end of output>".into(), "x".into())));
        assert_eq!(first_divergence("a", "a\n"), Some((1, "a".into(), "a".into())));
    }

    #[test]
    fn errors_leave_state_alone() {
        let mut s = Session::new();
        s.set_cursor(Timestamp::hm(8, 13));
        assert!(s.run_command(".at 8:61").is_err());
        assert!(s.run_command("SELECT * FROM Nope;").is_err());
        assert!(s.run_command(".load missing.sql").is_err());
        assert!(s.run_command(".bogus").is_err());
        assert_eq!(s.cursor(), Timestamp::hm(8, 13));
        assert!(s.catalog().is_empty());
    }

    #[test]
    fn statements_accumulate_until_semicolon() {
        let mut s = Session::new();
        assert_eq!(s.run_command("SELECT *").unwrap(), "");
        assert!(s.is_pending());
        assert!(s.run_command("FROM Bid;").is_err());
        assert!(!s.is_pending());
    }
}
