use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Ordered `key=value` outputs of one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs(Vec<(String, Value)>);

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.0.push((key.into(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// One `key=value` line per entry. Floats print in round-trip form.
    ///
    /// An object with a `status` field renders as `key=status` followed by
    /// its other fields as space-separated `field=value` pairs.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            match v {
                Value::Object(map) if map.contains_key("status") => {
                    let _ = write!(out, "{k}={}", scalar(&map["status"]));
                    for (field, value) in map.iter().filter(|(f, _)| *f != "status") {
                        let _ = write!(out, " {field}={}", quoted(value));
                    }
                    out.push('\n');
                }
                other => {
                    let _ = writeln!(out, "{k}={}", scalar(other));
                }
            }
        }
        out
    }

    fn to_map(&self) -> Map<String, Value> {
        self.0.iter().cloned().collect()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".to_string(),
        other => other.to_string(),
    }
}

/// Like [`scalar`], but strings containing spaces stay JSON-quoted.
fn quoted(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains(char::is_whitespace) => v.to_string(),
        other => scalar(other),
    }
}

/// Machine-readable record of a run.
///
/// `seed` is always serialized, as `null` for commands that draw no random
/// numbers.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub outputs: Map<String, Value>,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(
        command: Vec<String>,
        inputs_digest: String,
        outputs: &Outputs,
        seed: Option<u64>,
        wall_time: Duration,
        exit_code: i32,
    ) -> Self {
        Self {
            command,
            inputs_digest,
            outputs: outputs.to_map(),
            seed,
            wall_time_s: wall_time.as_secs_f64(),
            exit_code,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SHA-256 over the length-prefixed input blobs, hex encoded.
pub fn digest_inputs<'a>(inputs: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut hasher = Sha256::new();
    for blob in inputs {
        hasher.update((blob.len() as u64).to_le_bytes());
        hasher.update(blob);
    }
    hex::encode(hasher.finalize())
}
