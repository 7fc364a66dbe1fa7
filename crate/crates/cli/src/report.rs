//! Canonical serialization: sorted keys, floats rounded to 12 significant
//! digits, two-space indentation, trailing newline.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Overall outcome of a run, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    // round through scientific notation, then print the shortest round-trip form
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses");
    let s = format!("{rounded:?}");
    if s.contains('e') && !s.contains('.') {
        s.replacen('e', ".0e", 1)
    } else {
        s
    }
}

fn format_number(n: &Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        format_float(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&format_number(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String((*k).clone()));
                write_value(out, &m[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
    }
}

pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            for k in keys {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, &m[k], rows);
            }
        }
        Value::Array(a) => {
            // arrays of objects (report sections) are indexed; arrays of scalars are skipped
            for (i, x) in a.iter().enumerate() {
                if x.is_object() {
                    flatten(&format!("{prefix}.{i}"), x, rows);
                }
            }
        }
        Value::Null => rows.push((prefix.into(), String::new())),
        Value::Bool(b) => rows.push((prefix.into(), b.to_string())),
        Value::Number(n) => rows.push((prefix.into(), format_number(n))),
        Value::String(s) => rows.push((prefix.into(), s.clone())),
    }
}

pub fn csv_rows(v: &Value) -> Result<String, CliError> {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn emit(report: &Value, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(canonical_json(report)),
        Format::Csv => csv_rows(report),
    }
}

/// Object builder that keeps reports terse at the call sites.
#[derive(Debug, Default, Clone)]
pub struct Section(Map<String, Value>);

impl Section {
    pub fn new(name: &str) -> Self {
        let mut m = Map::new();
        m.insert("analysis".into(), Value::from(name));
        Section(m)
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.0.insert(key.into(), v.into());
        self
    }

    pub fn float(&mut self, key: &str, x: f64) -> &mut Self {
        self.set(key, Number::from_f64(x).map_or(Value::Null, Value::Number))
    }

    /// A threshold with where it came from (`"default"` or `"config"`).
    pub fn threshold(&mut self, key: &str, value: f64, from_config: bool) -> &mut Self {
        let entry = self.0.entry("thresholds").or_insert_with(|| Value::Object(Map::new()));
        let mut t = Map::new();
        t.insert("value".into(), Number::from_f64(value).map_or(Value::Null, Value::Number));
        t.insert("provenance".into(), Value::from(if from_config { "config" } else { "default" }));
        entry.as_object_mut().expect("thresholds is an object").insert(key.into(), Value::Object(t));
        self
    }

    pub fn status(&mut self, s: Status) -> &mut Self {
        self.set("status", s.as_str())
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

pub fn float_value(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_are_rounded_to_twelve_digits() {
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(0.1 + 0.2), "0.3");
        assert_eq!(format_float(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_float(-1.5e-20), "-1.5e-20");
        assert_eq!(format_float(1e300), "1.0e300");
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({"b": 1, "a": {"d": [], "c": 2.5}});
        assert_eq!(canonical_json(&v), "{\n  \"a\": {\n    \"c\": 2.5,\n    \"d\": []\n  },\n  \"b\": 1\n}\n");
    }

    #[test]
    fn csv_keeps_scalars_only() {
        let v = json!({"status": "pass", "results": [{"x": 1.0, "list": [1, 2]}], "empty": []});
        let s = csv_rows(&v).unwrap();
        assert_eq!(s, "field,value\nresults.0.x,1.0\nstatus,pass\n");
    }

    #[test]
    fn empty_report_is_valid_json() {
        let s = canonical_json(&json!({"results": []}));
        assert_eq!(serde_json::from_str::<Value>(&s).unwrap(), json!({"results": []}));
    }
}
