//! The record every command emits, and its rendering as JSON, CSV or text.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub pass: Option<bool>,
    /// Wall time in milliseconds; 0 unless timing was requested, so that
    /// repeated runs produce identical output.
    pub timing_ms: u64,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        OutputRecord {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            pass: None,
            timing_ms: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.results.insert(key.to_string(), to_value(value));
        self
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string()),
            Format::Csv => self.render_csv(),
            Format::Human => Ok(self.render_human()),
        }
    }

    /// Tabular results (`rows`, an array of flat objects) become one CSV row
    /// each; anything else is flattened to `section,key,value` lines.
    fn render_csv(&self) -> Result<String, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(Value::Array(rows)) = self.results.get("rows") {
            let mut header: Vec<String> = Vec::new();
            for row in rows {
                if let Value::Object(map) = row {
                    for k in map.keys() {
                        if !header.contains(k) {
                            header.push(k.clone());
                        }
                    }
                }
            }
            w.write_record(&header).map_err(|e| e.to_string())?;
            for row in rows {
                let cells: Vec<String> = header.iter().map(|k| cell(row.get(k))).collect();
                w.write_record(&cells).map_err(|e| e.to_string())?;
            }
        } else {
            w.write_record(["section", "key", "value"])
                .map_err(|e| e.to_string())?;
            w.write_record(["command", "", &self.command])
                .map_err(|e| e.to_string())?;
            for (section, map) in [("input", &self.inputs), ("result", &self.results)] {
                for (k, v) in map {
                    let mut flat = Vec::new();
                    flatten(k, v, &mut flat);
                    for (key, value) in flat {
                        w.write_record([section, &key, &value])
                            .map_err(|e| e.to_string())?;
                    }
                }
            }
            let pass = self.pass.map(|p| p.to_string()).unwrap_or_default();
            w.write_record(["pass", "", &pass])
                .map_err(|e| e.to_string())?;
        }
        let bytes = w.into_inner().map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }

    fn render_human(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for (title, map) in [("inputs", &self.inputs), ("results", &self.results)] {
            if map.is_empty() {
                continue;
            }
            out.push_str(title);
            out.push_str(":\n");
            for (k, v) in map {
                let mut flat = Vec::new();
                flatten(k, v, &mut flat);
                for (key, value) in flat {
                    out.push_str(&format!("  {key} = {value}\n"));
                }
            }
        }
        if let Some(p) = self.pass {
            out.push_str(&format!("pass: {p}\n"));
        }
        if self.timing_ms > 0 {
            out.push_str(&format!("timing_ms: {}\n", self.timing_ms));
        }
        out
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&format!("{prefix}.{k}"), inner, out);
            }
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), inner, out);
            }
        }
        other => out.push((prefix.to_string(), cell(Some(other)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputRecord {
        let mut r = OutputRecord::new("eval");
        r.input("q", "0.5")
            .result("value_re", 1.0)
            .result("nested", serde_json::json!({"a": [1, 2]}));
        r.pass = Some(true);
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let s = r.render(Format::Json).unwrap();
        let back: OutputRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_flattens_nested_values() {
        let s = sample().render(Format::Csv).unwrap();
        assert!(s.contains("result,nested.a.1,2"));
        assert!(s.starts_with("section,key,value"));
    }

    #[test]
    fn csv_rows_become_a_table() {
        let mut r = OutputRecord::new("table");
        r.result(
            "rows",
            serde_json::json!([{"n": 5, "tau": 0.27}, {"n": 6, "tau": 0.39}]),
        );
        let s = r.render(Format::Csv).unwrap();
        assert_eq!(s, "n,tau\n5,0.27\n6,0.39\n");
    }

    #[test]
    fn human_lists_keys() {
        let s = sample().render(Format::Human).unwrap();
        assert!(s.contains("  value_re = 1.0"));
        assert!(s.ends_with("pass: true\n"));
    }
}
