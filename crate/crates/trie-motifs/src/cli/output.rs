//! Output assembly: self-describing artifacts in JSON or CSV.
//!
//! Every command emits one artifact that embeds the resolved [`RunConfig`]
//! and the library version. JSON artifacts are a single object
//! `{"version": ..., "config": ..., "<payload key>": ...}`. CSV artifacts
//! carry the same provenance as `#`-prefixed preamble lines followed by an
//! RFC 4180 table with a mandatory header row.
//!
//! All computed reals are rounded to 12 significant digits before emission
//! so regression tables are byte-comparable; the echoed config rounds its
//! probabilities to 10 (see [`RunConfig::canonical`]). Integral counts stay
//! integers.

use std::fs;

use serde_json::Value;

use crate::numeric::round_sig;

use super::config::{OutputFormat, RunConfig};
use super::CliError;

/// A flat table: the CSV projection of an artifact.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Rounds every floating-point number in the tree to `digits` significant
/// digits, leaving integers untouched.
pub fn round_floats(value: &mut Value, digits: i32) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let rounded = round_sig(n.as_f64().unwrap(), digits);
                if let Some(number) = serde_json::Number::from_f64(rounded) {
                    *value = Value::Number(number);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                round_floats(item, digits);
            }
        }
        Value::Object(map) => {
            for (_, item) in map.iter_mut() {
                round_floats(item, digits);
            }
        }
        _ => {}
    }
}

/// 12-significant-digit text for a computed real; scientific notation for
/// magnitudes where positional digits would be unreadable.
pub fn format_real(x: f64) -> String {
    let rounded = round_sig(x, 12);
    if rounded != 0.0 && (rounded.abs() < 1e-4 || rounded.abs() >= 1e15) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// Serializes `payload` under `key` with provenance and writes it to the
/// configured destination.
pub fn emit(config: &RunConfig, key: &str, payload: Value, table: Table) -> Result<(), CliError> {
    let text = render(config, key, payload, table)?;
    match &config.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {path}: {e}")))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(config: &RunConfig, key: &str, payload: Value, table: Table) -> Result<String, CliError> {
    match config.format.unwrap_or_default() {
        OutputFormat::Json => render_json(config, key, payload),
        OutputFormat::Csv => render_csv(config, table),
    }
}

fn render_json(config: &RunConfig, key: &str, mut payload: Value) -> Result<String, CliError> {
    round_floats(&mut payload, 12);
    let artifact = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config.canonical(),
        key: payload,
    });
    let mut text = serde_json::to_string_pretty(&artifact)
        .map_err(|e| CliError::Numeric(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn render_csv(config: &RunConfig, table: Table) -> Result<String, CliError> {
    let config_line = serde_json::to_string(&config.canonical())
        .map_err(|e| CliError::Numeric(format!("serialization failed: {e}")))?;
    let mut text = format!(
        "# trie-motifs {}\n# config: {}\n",
        env!("CARGO_PKG_VERSION"),
        config_line
    );
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&table.header)
        .and_then(|()| {
            table
                .rows
                .iter()
                .try_for_each(|row| writer.write_record(row))
        })
        .map_err(|e| CliError::Numeric(format!("csv write failed: {e}")))?;
    let body = writer
        .into_inner()
        .map_err(|e| CliError::Numeric(format!("csv write failed: {e}")))?;
    text.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
    Ok(text)
}
