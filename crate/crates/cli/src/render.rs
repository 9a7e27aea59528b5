//! Plain-text rendering of JSON reports: one `key: value` line per field,
//! matrices one row per line.

use serde_json::Value;

fn is_matrix(v: &Value) -> bool {
    v.as_array().is_some_and(|rows| {
        !rows.is_empty() && rows.iter().all(|r| r.as_array().is_some_and(|r| r.iter().all(Value::is_number)))
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn field(out: &mut String, indent: usize, key: &str, v: &Value) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, x) in m {
                field(out, indent + 1, k, x);
            }
        }
        Value::Array(rows) if is_matrix(v) && rows.len() > 1 => {
            out.push_str(&format!("{pad}{key}:\n"));
            for r in rows {
                out.push_str(&format!("{pad}  {r}\n"));
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || is_matrix(x)) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, x) in items.iter().enumerate() {
                field(out, indent + 1, &format!("[{}]", i + 1), x);
            }
        }
        Value::Array(items) if items.iter().all(Value::is_string) => {
            if items.is_empty() {
                out.push_str(&format!("{pad}{key}: (none)\n"));
            }
            for x in items {
                out.push_str(&format!("{pad}{key}: {}\n", scalar(x)));
            }
        }
        other => out.push_str(&format!("{pad}{key}: {}\n", scalar(other))),
    }
}

pub fn text(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                field(&mut out, 0, k, x);
            }
        }
        other => field(&mut out, 0, "result", other),
    }
    out
}
