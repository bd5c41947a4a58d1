//! Output framing. Every document carries the tool version, the command,
//! its configuration and seed; nothing time-dependent unless asked for.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

pub fn json_doc(command: &str, config: Value, seed: Option<u64>, result: Value) -> String {
    let doc = json!({
        "tool": "dmera",
        "version": VERSION,
        "command": command,
        "config": config,
        "seed": seed,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

/// `#`-prefixed preamble for CSV output.
pub fn csv_header(command: &str, config: &Value, seed: Option<u64>) -> String {
    let seed = seed.map_or("none".to_string(), |s| s.to_string());
    format!("# dmera {VERSION}\n# command: {command}\n# config: {config}\n# seed: {seed}\n")
}

pub fn csv_body<S: serde::Serialize>(rows: &[S]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
