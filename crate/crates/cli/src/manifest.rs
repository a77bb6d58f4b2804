use serde::Serialize;
use serde_json::Value;

/// Provenance record written next to, and embedded in, every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub dataset: String,
    pub dataset_hash: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finished_at: Option<String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn start(command: &str, config: Value, seed: u64, dataset: &str, dataset_hash: String) -> Self {
        RunManifest {
            command: command.into(),
            config,
            seed,
            dataset: dataset.into(),
            dataset_hash,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_at: Some(now()),
            finished_at: None,
        }
    }

    pub fn finish(&mut self) {
        self.finished_at = Some(now());
    }

    /// The reproducible part: everything except the timestamps.
    pub fn stable(&self) -> Value {
        let mut m = self.clone();
        m.started_at = None;
        m.finished_at = None;
        serde_json::to_value(m).expect("manifest serialises")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    /// One-line form for SVG comments.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("manifest serialises")
    }
}
