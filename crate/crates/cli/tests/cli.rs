use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn tvr(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tvr"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

#[test]
fn golden_script_passes() {
    let (script, expected) = (data("walkthrough.tvr"), data("walkthrough.expected"));
    let out = tvr(&["--script", script.to_str().unwrap(), "--expect", expected.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
}

#[test]
fn golden_mismatch_exits_one_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let expected = dir.path().join("bad.expected");
    let golden = std::fs::read_to_string(data("walkthrough.expected")).unwrap();
    std::fs::write(&expected, golden.replace("| $5    | D    |", "| $5    | X    |")).unwrap();
    let script = data("walkthrough.tvr");
    let out = tvr(&["--script", script.to_str().unwrap(), "--expect", expected.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.contains("mismatch at line") && err.contains("X"), "{err}");
}

#[test]
fn empty_script_matches_empty_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let (script, expected) = (dir.path().join("s.tvr"), dir.path().join("s.expected"));
    std::fs::write(&script, "").unwrap();
    std::fs::write(&expected, "").unwrap();
    let out = tvr(&["--script", script.to_str().unwrap(), "--expect", expected.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_files_and_bad_usage_exit_two() {
    let out = tvr(&["--script", "/nonexistent/x.tvr", "--expect", "/nonexistent/x.expected"], "");
    assert_eq!(out.status.code(), Some(2));
    let out = tvr(&["--expect", "x"], "");
    assert_eq!(out.status.code(), Some(2));
    let out = tvr(&["--schema", "/nonexistent/bid.sql"], "");
    assert_eq!(out.status.code(), Some(2));
    let schema = data("bid.sql");
    let out = tvr(&["--schema", schema.to_str().unwrap(), "--log", "Bid"], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stdin_session_with_preloaded_sources() {
    let (schema, log) = (data("bid.sql"), data("bid.log"));
    let log_arg = format!("Bid={}", log.display());
    let input = "SELECT MAX(wstart), wend,\n  SUM(price) FROM Tumble(TABLE(Bid), DESCRIPTOR(bidtime), INTERVAL '10' MINUTES)\n  GROUP BY wend;\nSELECT nope FROM Bid;\n.quit\nSELECT * FROM Bid;\n";
    let out = tvr(&["--schema", schema.to_str().unwrap(), "--log", &log_arg, "--at", "8:13"], input);
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("| 8:00   | 8:10 | $6    |"), "{stdout}");
    assert!(stdout.contains("| 8:10   | 8:20 | $3    |"), "{stdout}");
    assert_eq!(stdout.matches("| wstart").count(), 1, "stopped at .quit");
    assert!(text(&out.stderr).starts_with("error: unknown column 'nope'"), "{}", text(&out.stderr));
}
