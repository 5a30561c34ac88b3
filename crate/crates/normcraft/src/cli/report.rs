//! Flat `key=value` reports with an optional JSON rendering.

use serde_json::{Map, Number, Value};

/// Parameters and results of one command, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Report {
    parameters: Vec<(String, Value)>,
    results: Vec<(String, Value)>,
}

fn float(v: f64) -> Value {
    Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Floats get six decimals, everything else its natural form.
fn text(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.6}", n.as_f64().expect("f64")),
        Value::String(s) => s.clone(),
        Value::Null => "nan".into(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.param("command", command);
        r
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.parameters.push((key.into(), v.into()));
        self
    }

    pub fn param_f64(&mut self, key: &str, v: f64) -> &mut Self {
        self.parameters.push((key.into(), float(v)));
        self
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.results.push((key.into(), v.into()));
        self
    }

    pub fn result_f64(&mut self, key: &str, v: f64) -> &mut Self {
        self.results.push((key.into(), float(v)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.parameters
            .iter()
            .chain(&self.results)
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }

    /// Parameters first, then results, one `key=value` per line.
    pub fn to_text(&self) -> String {
        self.parameters
            .iter()
            .chain(&self.results)
            .map(|(k, v)| format!("{k}={}\n", text(v)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let section = |entries: &[(String, Value)]| {
            Value::Object(entries.iter().cloned().collect::<Map<String, Value>>())
        };
        let mut root = Map::new();
        root.insert("parameters".into(), section(&self.parameters));
        root.insert("results".into(), section(&self.results));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values serialize");
        s.push('\n');
        s
    }
}
