//! Machine-readable result records.
//!
//! A record is a schema tag plus an ordered list of typed fields. The text
//! form is one `key: value` line per field after a `schema: <tag>` line;
//! the JSON form is `{"schema": <tag>, "payload": {...}}` on a single line.
//! Reals use the shortest representation that parses back to the same
//! `f64`, so both forms round-trip exactly.

use std::fmt;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Real(v)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v as i64)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_owned())
    }
}

/// `{:?}` on `f64` is the shortest round-trip form and always shows a
/// decimal point or exponent, so reals never read back as integers.
pub fn format_real(v: f64) -> String {
    format!("{v:?}")
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Int(v) => write!(f, "{v}"),
            Field::Real(v) => f.write_str(&format_real(*v)),
            Field::Bool(v) => write!(f, "{v}"),
            Field::Text(s) => f.write_str(&Value::String(s.clone()).to_string()),
        }
    }
}

impl Field {
    fn parse_text(raw: &str) -> Result<Self, String> {
        if raw.starts_with('"') {
            return serde_json::from_str::<String>(raw)
                .map(Field::Text)
                .map_err(|e| format!("bad quoted text {raw:?}: {e}"));
        }
        match raw {
            "true" => return Ok(Field::Bool(true)),
            "false" => return Ok(Field::Bool(false)),
            _ => {}
        }
        if raw.bytes().all(|b| b.is_ascii_digit() || b == b'-') {
            if let Ok(v) = raw.parse() {
                return Ok(Field::Int(v));
            }
        }
        raw.parse::<f64>()
            .map(Field::Real)
            .map_err(|_| format!("cannot read value {raw:?}"))
    }

    fn to_json(&self) -> Value {
        match self {
            Field::Int(v) => Value::from(*v),
            Field::Real(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Field::Bool(v) => Value::Bool(*v),
            Field::Text(s) => Value::String(s.clone()),
        }
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Bool(b) => Ok(Field::Bool(*b)),
            Value::String(s) => Ok(Field::Text(s.clone())),
            Value::Number(n) if n.is_i64() => Ok(Field::Int(n.as_i64().unwrap())),
            Value::Number(n) => n
                .as_f64()
                .map(Field::Real)
                .ok_or_else(|| format!("number {n} out of range")),
            other => Err(format!("unsupported JSON value {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub schema: String,
    pub payload: Vec<(String, Field)>,
}

impl OutputRecord {
    pub fn new(schema: &str) -> Self {
        Self {
            schema: schema.to_owned(),
            payload: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Field>) -> Self {
        self.payload.push((key.to_owned(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.payload.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("schema: {}\n", self.schema);
        for (k, v) in &self.payload {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let schema = lines
            .next()
            .and_then(|l| l.strip_prefix("schema: "))
            .ok_or("first line must be \"schema: <tag>\"")?;
        let mut record = OutputRecord::new(schema);
        for line in lines {
            let (k, v) = line
                .split_once(": ")
                .ok_or_else(|| format!("line {line:?} is not \"key: value\""))?;
            record.payload.push((k.to_owned(), Field::parse_text(v)?));
        }
        Ok(record)
    }

    pub fn to_json(&self) -> String {
        let payload: Map<String, Value> = self
            .payload
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let mut obj = Map::new();
        obj.insert("schema".into(), Value::String(self.schema.clone()));
        obj.insert("payload".into(), Value::Object(payload));
        Value::Object(obj).to_string()
    }

    pub fn parse_json(text: &str) -> Result<Self, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let schema = v
            .get("schema")
            .and_then(Value::as_str)
            .ok_or("missing string field \"schema\"")?;
        let payload = v
            .get("payload")
            .and_then(Value::as_object)
            .ok_or("missing object field \"payload\"")?;
        let mut record = OutputRecord::new(schema);
        for (k, v) in payload {
            record.payload.push((k.clone(), Field::from_json(v)?));
        }
        Ok(record)
    }
}
