//! Rendering of command results.
//!
//! Every command produces one JSON object. `json` prints it pretty with a
//! leading `schema`, `command`, `field` and `basis` header. `csv` and `table`
//! flatten it into `(key, value)` rows in document order, nested keys joined
//! with `.` and array positions written as indices. The CSV header is always
//! `command,key,value`.

use clap::ValueEnum;
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub const SCHEMA: &str = "v1";

/// Wraps a command body with the document header.
pub fn document(command: &str, field: Option<(&str, &str)>, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), command.into());
    if let Some((spec, basis)) = field {
        m.insert("field".into(), spec.into());
        m.insert("basis".into(), basis.into());
    }
    match body {
        Value::Object(b) => m.extend(b),
        other => {
            m.insert("result".into(), other);
        }
    }
    Value::Object(m)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) && !a.is_empty() => {
            let parts: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
        }
        Value::Array(a) => {
            if a.is_empty() {
                out.push((prefix.to_string(), "[]".into()));
            }
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        x => out.push((prefix.to_string(), scalar(x))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        x => x.to_string(),
    }
}

/// Key/value rows of a document, in document order.
pub fn rows(doc: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten("", doc, &mut out);
    out
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let command = doc.get("command").map(scalar).unwrap_or_default();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["command", "key", "value"]).expect("in-memory write");
            for (k, v) in rows(doc) {
                w.write_record([command.as_str(), &k, &v]).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
        Format::Table => {
            let r = rows(doc);
            let width = r.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut s = String::new();
            for (k, v) in r {
                s.push_str(&format!("{k:<width$}  {v}\n"));
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Value {
        document(
            "demo",
            Some(("Qsqrt:5", "w=(1+sqrt(d))/2")),
            json!({"x": {"lo": [1.0, 2.0]}, "list": [{"a": 1}, {"a": "p,q"}], "none": []}),
        )
    }

    #[test]
    fn rows_follow_document_order() {
        let r = rows(&sample());
        let keys: Vec<&str> = r.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(
            keys,
            ["schema", "command", "field", "basis", "x.lo", "list.0.a", "list.1.a", "none"]
        );
        assert_eq!(r[4].1, "[1.0, 2.0]");
    }

    #[test]
    fn csv_quotes_and_has_fixed_header() {
        let s = render(&sample(), Format::Csv);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("command,key,value"));
        assert!(s.contains("demo,list.1.a,\"p,q\""));
    }

    #[test]
    fn json_is_newline_terminated() {
        let s = render(&sample(), Format::Json);
        assert!(s.ends_with("}\n"));
        assert!(s.starts_with("{\n  \"schema\": \"v1\""));
    }
}
