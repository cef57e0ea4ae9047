//! The common output envelope `{command, config_echo, results, pass, worst_case}`
//! and its JSON / CSV renderings.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config_echo: Value,
    pub results: Value,
    pub pass: bool,
    pub worst_case: Value,
}

impl Report {
    pub fn new(command: impl Into<String>, config_echo: Value, results: impl Serialize, pass: bool) -> Result<Self> {
        Ok(Report {
            command: command.into(),
            config_echo,
            results: to_value(results)?,
            pass,
            worst_case: Value::Null,
        })
    }

    pub fn with_worst_case(mut self, worst: impl Serialize) -> Result<Self> {
        self.worst_case = to_value(worst)?;
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are JSON-safe")
    }

    /// Flattened `key,value` lines; nested keys are joined with `.`.
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        flatten("", &serde_json::to_value(self).expect("report values are JSON-safe"), &mut rows);
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["key", "value"]).expect("writing to memory");
        for (k, v) in rows {
            w.write_record([k, v]).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("input was UTF-8")
    }
}

pub fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::invalid(format!("cannot serialize result: {e}")))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
