//! JSON/CSV emission helpers: 12-significant-digit numbers, stable key
//! order, deterministic bytes.

use serde_json::Value;
use std::path::Path;

use crate::CliError;

/// Rounds to 12 significant decimal digits so reports are stable and
/// readable; non-finite values map to JSON null.
pub fn sig12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    if x == 0.0 {
        return serde_json::json!(0.0);
    }
    let magnitude = x.abs().log10().floor();
    let factor = 10f64.powf(11.0 - magnitude);
    let rounded = (x * factor).round() / factor;
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

/// One-row CSV rendering of a flat report: headers from the (sorted) top
/// level, nested objects skipped.
pub fn print_scalar_csv(value: &Value) {
    let Value::Object(map) = value else {
        print_json(value);
        return;
    };
    let mut headers = Vec::new();
    let mut row = Vec::new();
    for (key, v) in map {
        match v {
            Value::Number(n) => {
                headers.push(key.clone());
                row.push(n.to_string());
            }
            Value::Bool(b) => {
                headers.push(key.clone());
                row.push(b.to_string());
            }
            Value::String(s) => {
                headers.push(key.clone());
                row.push(s.replace(',', ";"));
            }
            _ => {}
        }
    }
    println!("{}", headers.join(","));
    println!("{}", row.join(","));
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Io {
                path: parent.display().to_string(),
                message: e.to_string(),
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
