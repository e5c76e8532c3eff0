//! Number formatting and the JSON report envelope.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";
pub const UNDEFINED: &str = "\u{2212}";

const FRACTION_TOLERANCE: f64 = 1e-9;
const MAX_DENOMINATOR: i64 = 16;
const SIGNIFICANT_DIGITS: usize = 12;

/// Small rationals as fractions, anything else with six decimals.
pub fn number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    for den in 1..=MAX_DENOMINATOR {
        let num = (v * den as f64).round();
        if (v - num / den as f64).abs() <= FRACTION_TOLERANCE && num.abs() < 1e15 {
            let num = num as i64;
            return match den {
                1 => num.to_string(),
                _ => format!("{num}/{den}"),
            };
        }
    }
    format!("{v:.6}")
}

pub fn optional(v: Option<f64>) -> String {
    v.map(number).unwrap_or_else(|| UNDEFINED.to_string())
}

fn round_significant(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    let text = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    text.parse().unwrap_or(v)
}

fn normalize(value: Value) -> Value {
    match value {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n
            .as_f64()
            .and_then(|f| serde_json::Number::from_f64(round_significant(f)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Machine-readable report. Keys come out sorted and floats are rounded to
/// twelve significant digits, so equal inputs give byte-identical output.
#[derive(Debug)]
pub struct ReportDocument {
    pub command: &'static str,
    pub input: Value,
    pub results: Value,
    pub seed: Option<u64>,
}

impl ReportDocument {
    pub fn new(command: &'static str, input: Value, results: &impl Serialize) -> Self {
        ReportDocument {
            command,
            input,
            results: serde_json::to_value(results).expect("report types serialize"),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        doc.insert("command".into(), Value::from(self.command));
        doc.insert("input".into(), self.input.clone());
        doc.insert("results".into(), normalize(self.results.clone()));
        if let Some(seed) = self.seed {
            doc.insert("seed".into(), Value::from(seed));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
        text.push('\n');
        text
    }
}
