//! Command results rendered as text or as a versioned JSON envelope.

use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

/// Version tag of the JSON envelope.
pub const SCHEMA: &str = "aic-report/1";

pub struct Report {
    command: &'static str,
    ok: bool,
    text: String,
    data: Value,
}

impl Report {
    pub fn ok(command: &'static str, text: impl Into<String>, data: Value) -> Report {
        Report { command, ok: true, text: text.into(), data }
    }

    pub fn fail(command: &'static str, text: impl Into<String>, data: Value) -> Report {
        Report { command, ok: false, text: text.into(), data }
    }

    pub fn finish(self, as_json: bool) -> ExitCode {
        if as_json {
            let mut v = json!({ "schema": SCHEMA, "command": self.command, "ok": self.ok });
            if let (Value::Object(out), Value::Object(extra)) = (&mut v, self.data) {
                out.extend(extra);
            }
            emit(&v.to_string());
        } else {
            emit(&self.text);
        }
        ExitCode::from(if self.ok { 0 } else { 1 })
    }
}

/// Usage errors and unreadable input (exit code 2).
pub struct Failure {
    message: String,
}

impl Failure {
    pub fn usage(message: String) -> Failure {
        Failure { message }
    }

    pub fn finish(self, as_json: bool) -> ExitCode {
        if as_json {
            emit(&json!({ "schema": SCHEMA, "ok": false, "usage_error": self.message }).to_string());
        } else {
            eprintln!("error: {}", self.message);
        }
        ExitCode::from(2)
    }
}

/// Writes one line to stdout. A closed pipe (`aic corpus list | head`) is not an error.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}
