//! Run manifests: the resolved config and arguments written next to every
//! output file. A manifest is itself a valid `--config` file; its recorded
//! arguments become the defaults for flags not given on the command line.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use topofactor::ConfigFile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Value,
    pub version: String,
    pub timestamp_unix: u64,
    pub input_hash: String,
}

/// Config as loaded, plus the manifest section when the file had one.
pub struct LoadedConfig {
    pub config: ConfigFile,
    pub previous: Option<RunManifest>,
}

pub fn load(path: Option<&Path>) -> Result<LoadedConfig, String> {
    let Some(path) = path else {
        return Ok(LoadedConfig { config: ConfigFile::default(), previous: None });
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let config = ConfigFile::from_json(&text).map_err(|e| e.to_string())?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let previous = match raw.get("manifest") {
        Some(m) => Some(serde_json::from_value(m.clone()).map_err(|e| format!("bad manifest section: {e}"))?),
        None => None,
    };
    Ok(LoadedConfig { config, previous })
}

/// Fills flags missing from `given` (null, or false for switches) from `recorded`.
pub fn merge_args(given: Value, recorded: Option<&Value>) -> Value {
    let (Value::Object(mut given), Some(Value::Object(recorded))) = (given.clone(), recorded) else {
        return given;
    };
    for (k, v) in recorded {
        let missing = matches!(given.get(k), None | Some(Value::Null) | Some(Value::Bool(false)));
        if missing {
            given.insert(k.clone(), v.clone());
        }
    }
    Value::Object(given)
}

pub fn input_hash(command: &str, args: &Value, config: &ConfigFile) -> String {
    let canonical = json!({ "command": command, "args": args, "config": config });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

pub fn build(command: &str, args: Value, config: &ConfigFile) -> Value {
    let manifest = RunManifest {
        command: command.to_string(),
        input_hash: input_hash(command, &args, config),
        args,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    let mut doc = Map::new();
    doc.insert("constants".into(), serde_json::to_value(&config.constants).expect("constants serialize"));
    doc.insert("presets".into(), serde_json::to_value(&config.presets).expect("presets serialize"));
    doc.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
    Value::Object(doc)
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
