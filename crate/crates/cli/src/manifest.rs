use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

/// What produced an output file. Everything except `timestamp` is a function
/// of the command line.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

/// `SOURCE_DATE_EPOCH` when set (reproducible builds convention), else now.
fn timestamp() -> String {
    let epoch = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse::<i64>().ok());
    let t = match epoch.and_then(|s| DateTime::<Utc>::from_timestamp(s, 0)) {
        Some(t) => t,
        None => Utc::now(),
    };
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters_serialize_in_key_order() {
        let m = RunManifest::new("sweep", 7).param("samples", 1000).param("family", "fermion");
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.find("family").unwrap() < json.find("samples").unwrap());
        assert!(json.contains("\"seed\":7"));
    }
}
