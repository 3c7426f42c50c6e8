//! Command line front end: parses arguments into a replayable plan, runs
//! it, and prints a JSON report whose bytes depend only on the plan and
//! seed (modulo the timestamp, which `--no-timestamp` suppresses).

pub mod error;
pub mod exec;
pub mod plan;

use std::io::Write;

use serde_json::{json, Map, Value};

use error::CliError;
use exec::Output;
use plan::{ParseOutcome, RunPlan};

/// Write to stdout, tolerating a reader that hung up (e.g. `| head`).
/// A broken pipe is not a run failure; any other write error is.
fn emit_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .or_else(|e| match e.kind() {
            std::io::ErrorKind::BrokenPipe => Ok(()),
            _ => Err(CliError::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            }),
        })
}

fn emit_error(e: &CliError) -> i32 {
    let body = json!({ "error": serde_json::to_value(e).expect("errors serialize") });
    let text = serde_json::to_string_pretty(&body).expect("valid json");
    let _ = emit_stdout(&format!("{text}\n"));
    eprintln!("curvkit: {e}");
    e.exit_code()
}

fn timestamp_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn envelope(plan: &RunPlan, report: Value) -> Value {
    let mut map = Map::new();
    map.insert("argv".into(), json!(plan.to_argv()));
    map.insert("command".into(), json!(plan.command.name()));
    map.insert("report".into(), report);
    if !plan.no_timestamp {
        map.insert("timestamp_unix_ms".into(), json!(timestamp_ms()));
    }
    Value::Object(map)
}

fn write_out(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn finish(plan: &RunPlan, output: Output) -> Result<(), CliError> {
    match output {
        Output::Report(report) => {
            let text = serde_json::to_string_pretty(&envelope(plan, report))
                .expect("reports serialize");
            match &plan.out {
                Some(path) => {
                    write_out(path, &text)?;
                    eprintln!("curvkit: report written to {}", path.display());
                }
                None => emit_stdout(&format!("{text}\n"))?,
            }
        }
        Output::Measure { csv, summary } => match &plan.out {
            Some(path) => {
                write_out(path, &csv)?;
                let mut report = summary;
                report["path"] = json!(path.display().to_string());
                let text = serde_json::to_string_pretty(&envelope(plan, report))
                    .expect("reports serialize");
                emit_stdout(&format!("{text}\n"))?;
            }
            None => emit_stdout(&csv)?,
        },
    }
    Ok(())
}

/// Parse and run one invocation; returns the process exit code. `argv`
/// excludes the binary name. Reports go to stdout, diagnostics to stderr.
pub fn run(argv: &[String]) -> i32 {
    let plan = match plan::parse_args(argv) {
        Ok(ParseOutcome::Plan(p)) => p,
        Ok(ParseOutcome::Help(text)) => {
            eprintln!("{text}");
            return 0;
        }
        Err(e) => return emit_error(&e),
    };
    match exec::execute(&plan).and_then(|out| finish(&plan, out)) {
        Ok(()) => 0,
        Err(e) => emit_error(&e),
    }
}
