//! JSON and aligned-table output.

use gooddeal_core::{DiagnosticReport, Extended, Witness};
use serde_json::{json, Map, Value};

/// A finite number, or `null` for infinities and NaN.
pub fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn extended(v: Extended) -> Value {
    match v {
        Extended::Finite(x) => number(x),
        _ => Value::Null,
    }
}

/// `"-inf"`, `"+inf"` or `"finite"`.
pub fn status(v: Extended) -> &'static str {
    match v {
        Extended::Finite(_) => "finite",
        Extended::NegInf => "-inf",
        Extended::PosInf => "+inf",
    }
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| number(*x)).collect())
}

pub fn report(r: &DiagnosticReport) -> Value {
    let margins: Map<String, Value> = r.margins.iter().map(|(k, v)| (k.clone(), number(*v))).collect();
    let witnesses: Map<String, Value> = r
        .witnesses
        .iter()
        .map(|(k, w)| {
            let v = match w {
                Witness::Scalar(x) => number(*x),
                Witness::Vector(x) => vector(x),
                Witness::Text(t) => Value::String(t.clone()),
            };
            (k.clone(), v)
        })
        .collect();
    json!({
        "check": r.check,
        "verdict": r.verdict.as_str(),
        "margins": margins,
        "witnesses": witnesses,
        "notes": r.notes,
    })
}

pub fn to_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::from("inf"),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(cell).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

/// Rows of `(label, cells)` with every column padded to its widest entry.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>())];
    out.push(line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    out.extend(rows.iter().map(|r| line(r)));
    out.join("\n")
}

/// Any JSON object as a two-column table; nested objects are flattened with dots.
pub fn object_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    table(&["key", "value"], &rows)
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, inner, rows);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), inner, rows);
            }
        }
        Value::Array(items) if prefix.ends_with("notes") => {
            for (i, inner) in items.iter().enumerate() {
                rows.push(vec![format!("{prefix}[{i}]"), cell(inner)]);
            }
        }
        other => rows.push(vec![prefix.to_string(), cell(other)]),
    }
}
