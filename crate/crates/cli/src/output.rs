use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the canonical JSON form of `config`.
pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

/// A JSON document wrapped with the tool version and the config it came from.
pub fn json_document(command: &str, config: &Value, result: impl Serialize) -> anyhow::Result<String> {
    let doc = json!({
        "tool": "bosefermi",
        "version": VERSION,
        "command": command,
        "config_hash": config_hash(config),
        "config": config,
        "result": serde_json::to_value(result)?,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Comment lines placed in front of every CSV file.
pub fn csv_header(command: &str, config: &Value) -> String {
    format!(
        "# tool=bosefermi version={VERSION} command={command} config_hash={}\n# config={}\n",
        config_hash(config),
        config
    )
}

/// Formats a float so that it round-trips; non-finite values become empty fields.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes `text` to `path` or, without a path, to standard output.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn in_dir(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
