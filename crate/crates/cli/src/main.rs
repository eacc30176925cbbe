use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use tvr_core::{run_script, Catalog, Session, Timestamp};

/// Query time-varying relations with streaming SQL.
///
/// Without --script, reads commands from standard input. SQL statements end
/// with `;`; dot-commands are `.load`, `.at`, `.tail`, `.capture`, `.help`
/// and `.quit`.
#[derive(Parser, Debug)]
#[command(name = "tvr", version)]
struct Args {
    /// Schema DDL file declaring the sources.
    #[arg(long, value_name = "FILE")]
    schema: Option<PathBuf>,

    /// Attach a log to a declared source.
    #[arg(long = "log", value_name = "NAME=FILE", requires = "schema")]
    logs: Vec<String>,

    /// Run a script instead of reading standard input.
    #[arg(long, value_name = "FILE")]
    script: Option<PathBuf>,

    /// Compare the script transcript byte for byte with this file.
    #[arg(long, value_name = "FILE", requires = "script")]
    expect: Option<PathBuf>,

    /// Initial processing-time cursor (default: end of the loaded logs).
    #[arg(long, value_name = "H:MM")]
    at: Option<Timestamp>,
}

fn load(args: &Args) -> anyhow::Result<Session> {
    let Some(schema) = &args.schema else {
        return Ok(Session::new());
    };
    let ddl = std::fs::read_to_string(schema).with_context(|| format!("reading {}", schema.display()))?;
    let mut catalog = Catalog::from_ddl(&ddl).with_context(|| format!("in {}", schema.display()))?;
    for spec in &args.logs {
        let Some((name, file)) = spec.split_once('=') else {
            bail!("--log expects NAME=FILE, got '{spec}'");
        };
        let text = std::fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
        catalog.attach_log(name, &text).with_context(|| format!("in {file}"))?;
    }
    Ok(Session::with_catalog(catalog))
}

fn interactive(session: &mut Session) -> anyhow::Result<()> {
    let stdin = io::stdin();
    let tty = stdin.is_terminal();
    let mut out = io::stdout().lock();
    let mut lines = stdin.lock().lines();
    while !session.is_finished() {
        if tty {
            let prompt = if session.is_pending() { " ".repeat(session.prompt().len()) } else { session.prompt() };
            write!(out, "{prompt}")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        match session.run_command(&line?) {
            Ok(text) => write!(out, "{text}")?,
            Err(e) => eprintln!("error: {e}"),
        }
    }
    Ok(())
}

fn run(args: Args) -> anyhow::Result<ExitCode> {
    let mut session = load(&args)?;
    if let Some(at) = args.at {
        session.set_cursor(at);
    }
    match (&args.script, &args.expect) {
        (Some(script), Some(expected)) => {
            let report = run_script(&mut session, script, expected)?;
            match &report.divergence {
                None => {
                    println!("ok: transcript matches {}", expected.display());
                    Ok(ExitCode::SUCCESS)
                }
                Some((line, want, got)) => {
                    eprintln!("mismatch at line {line}:\n  expected: {want}\n  actual:   {got}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        (Some(script), None) => {
            let text = std::fs::read_to_string(script).with_context(|| format!("reading {}", script.display()))?;
            if let Some(dir) = script.parent() {
                session.set_base_dir(dir);
            }
            print!("{}", session.transcript(&text));
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            interactive(&mut session)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
