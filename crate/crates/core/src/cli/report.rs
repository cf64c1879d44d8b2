//! Machine-readable command output.
//!
//! JSON: one flat object of result fields, plus `rows` for tables and the
//! full `config` that produced it. CSV: a header row, then one row per
//! result (or table row). Floats carry 9 significant digits in both.

use serde_json::{Map, Number, Value as Json};

use super::config::{OutputFormat, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

pub type Row = Vec<(&'static str, Value)>;

/// Rounds to 9 significant digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

impl Value {
    fn to_json(&self) -> Json {
        match self {
            Value::Float(x) => Number::from_f64(round_sig9(*x))
                .map(Json::Number)
                .unwrap_or(Json::Null),
            Value::Int(n) => Json::from(*n),
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
        }
    }

    fn to_cell(&self) -> String {
        match self.to_json() {
            Json::String(s) => s,
            other => other.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    pub fields: Row,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(command: &'static str, config: &RunConfig, fields: Row) -> Self {
        Self {
            command,
            config: config.clone(),
            fields,
            rows: Vec::new(),
        }
    }

    pub fn table(command: &'static str, config: &RunConfig, rows: Vec<Row>) -> Self {
        Self {
            command,
            config: config.clone(),
            fields: Vec::new(),
            rows,
        }
    }

    pub fn field(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut object = Map::new();
        object.insert("command".into(), Json::from(self.command));
        for (k, v) in &self.fields {
            object.insert((*k).into(), v.to_json());
        }
        if !self.rows.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|row| {
                    Json::Object(row.iter().map(|(k, v)| ((*k).to_string(), v.to_json())).collect())
                })
                .collect();
            object.insert("rows".into(), Json::Array(rows));
        }
        object.insert(
            "config".into(),
            serde_json::to_value(&self.config).expect("config serializes"),
        );
        let mut text = serde_json::to_string_pretty(&Json::Object(object)).expect("valid JSON");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<&Row> = if self.rows.is_empty() {
            vec![&self.fields]
        } else {
            self.rows.iter().collect()
        };
        let mut writer = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = rows[0].iter().map(|(k, _)| *k).collect();
        writer.write_record(&header).expect("in-memory write");
        for row in rows {
            writer
                .write_record(row.iter().map(|(_, v)| v.to_cell()))
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 csv")
    }
}
