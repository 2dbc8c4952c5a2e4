use std::io::Write;
use std::process::ExitCode;

use serde_json::{json, Value};

use crate::Cli;

/// Result of one subcommand.
pub struct Outcome {
    pub command: &'static str,
    /// Machine-readable report body.
    pub body: Value,
    /// Human-readable rendering.
    pub text: String,
    /// False when a verdict or verification failed.
    pub passed: bool,
    /// Raw output (e.g. an exported graph) printed instead of the report.
    pub raw: Option<String>,
}

impl Outcome {
    pub fn new(command: &'static str, body: Value, text: String) -> Self {
        Outcome { command, body, text, passed: true, raw: None }
    }
}

/// Wraps a report body with the command name, tool version and (unless
/// suppressed) a timestamp.
pub fn envelope(cli: &Cli, command: &str, body: &Value) -> Value {
    let mut v = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cli.seed,
    });
    if !cli.no_timestamp {
        v["generated_at"] = json!(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    v["report"] = body.clone();
    v
}

/// Prints the outcome. A closed stdout (e.g. piped into `head`) is not an error.
pub fn emit(cli: &Cli, out: &Outcome) {
    let text = if let Some(raw) = &out.raw {
        raw.clone()
    } else if cli.json {
        let v = envelope(cli, out.command, &out.body);
        serde_json::to_string_pretty(&v).expect("report serialises") + "\n"
    } else if out.text.ends_with('\n') {
        out.text.clone()
    } else {
        format!("{}\n", out.text)
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

pub fn fail(json: bool, kind: &str, msg: &str) -> ExitCode {
    if json {
        eprintln!("{}", json!({ "error": kind, "message": msg }));
    } else {
        eprintln!("{kind}: {msg}");
    }
    ExitCode::from(1)
}
