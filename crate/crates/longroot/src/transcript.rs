//! Structured run transcript: one JSON record per algorithm step,
//! deterministic for a fixed (descriptor, seed, config) triple.

use serde_json::{json, Value};

#[derive(Debug, Default)]
pub struct Transcript {
    records: Vec<Value>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript { records: Vec::new() }
    }

    pub fn log(&mut self, algorithm: &str, step: &str, fields: Value) {
        let mut rec = json!({
            "algorithm": algorithm,
            "step": step,
        });
        if let (Value::Object(base), Value::Object(extra)) = (&mut rec, fields) {
            for (k, v) in extra {
                base.insert(k, v);
            }
        }
        self.records.push(rec);
    }

    pub fn records(&self) -> &[Value] {
        &self.records
    }

    /// One record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}
