use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Category, CategoryExt};

/// Record of one command invocation, written next to its primary output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub backends: Value,
    /// Input path to the SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
    pub scorer_calls: usize,
    pub embed_texts: usize,
    pub embed_batches: usize,
}

impl RunManifest {
    pub fn start(command: &str, config: Value) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            backends: Value::Null,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            started_at: now(),
            finished_at: String::new(),
            scorer_calls: 0,
            embed_texts: 0,
            embed_batches: 0,
        }
    }

    /// Reads an input file and records its digest.
    pub fn read_input(&mut self, path: &Path) -> anyhow::Result<Vec<u8>> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("reading {}", path.display()))
            .category(Category::Input)?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    pub fn finish(mut self, path: &Path) -> anyhow::Result<()> {
        self.finished_at = now();
        let mut json = serde_json::to_string_pretty(&self)?;
        json.push('\n');
        write_atomic(path, json.as_bytes())
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `<out>.manifest.json` unless a path was given.
pub fn manifest_path(out: &Path, explicit: Option<&Path>) -> PathBuf {
    explicit.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        out.with_file_name(name)
    })
}
