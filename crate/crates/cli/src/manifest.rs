//! Run metadata written next to every command's outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> anyhow::Result<Self> {
        let mut file =
            fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let mut h = Sha256::new();
        let mut buf = [0u8; 64 * 1024];
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            h.update(&buf[..n]);
        }
        let sha256 = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(FileDigest {
            path: path.to_path_buf(),
            sha256,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub arguments: serde_json::Value,
    pub config: serde_json::Value,
    pub deterministic: bool,
    pub threads: Option<usize>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// One entry per command invocation that wrote into this directory,
    /// keyed by command and its distinguishing argument.
    pub runs: BTreeMap<String, RunRecord>,
}

impl Manifest {
    fn empty() -> Self {
        Manifest {
            tool: "crednet".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            runs: BTreeMap::new(),
        }
    }
}

/// Adds or replaces `key` in the directory's manifest. No timestamps are
/// recorded, so identical runs leave identical manifests.
pub fn record(out_dir: &Path, key: &str, run: RunRecord) -> anyhow::Result<PathBuf> {
    let path = out_dir.join(MANIFEST_FILE);
    let mut manifest = match fs::read(&path) {
        Ok(bytes) => serde_json::from_slice(&bytes).unwrap_or_else(|e| {
            warn!(
                "{} is not a readable manifest ({e}); starting a new one",
                path.display()
            );
            Manifest::empty()
        }),
        Err(_) => Manifest::empty(),
    };
    manifest.version = env!("CARGO_PKG_VERSION").into();
    manifest.runs.insert(key.to_string(), run);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
