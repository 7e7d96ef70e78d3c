//! Run manifests: what went in, what came out, and how long it took.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub counts: BTreeMap<&'static str, u64>,
    pub outputs: Vec<FileDigest>,
    pub wall_clock_seconds: f64,
}

/// Collects the files of one run under its output directory and writes
/// the manifest last.
pub struct OutputDir {
    root: PathBuf,
    outputs: Vec<FileDigest>,
    started: Instant,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Renders a file in memory, writes it and records its digest.
    pub fn write<F>(&mut self, relative: &str, render: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf)?;
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&path, &buf).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(FileDigest {
            path: relative.to_string(),
            sha256: sha256_hex(&buf),
            bytes: buf.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, relative: &str, value: &T) -> Result<()> {
        self.write(relative, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value).map_err(|e| CliError::Io {
                context: relative.to_string(),
                source: e.into(),
            })?;
            buf.push(b'\n');
            Ok(())
        })
    }

    pub fn finish(
        mut self,
        command: &'static str,
        config: serde_json::Value,
        inputs: Vec<FileDigest>,
        counts: BTreeMap<&'static str, u64>,
    ) -> Result<RunManifest> {
        self.outputs.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs,
            counts,
            outputs: std::mem::take(&mut self.outputs),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let path = self.root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn outputs_listed_sorted_with_digests() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(&dir.path().join("run")).unwrap();
        out.write("b/x.csv", |buf| {
            buf.extend_from_slice(b"abc");
            Ok(())
        })
        .unwrap();
        out.write_json("a.json", &[1, 2]).unwrap();
        let m = out.finish("test", serde_json::Value::Null, vec![], BTreeMap::new()).unwrap();
        let paths: Vec<&str> = m.outputs.iter().map(|o| o.path.as_str()).collect();
        assert_eq!(paths, ["a.json", "b/x.csv"]);
        assert_eq!(m.outputs[1].sha256, sha256_hex(b"abc"));
        assert!(dir.path().join("run/manifest.json").is_file());
        assert_eq!(std::fs::read(dir.path().join("run/b/x.csv")).unwrap(), b"abc");
    }
}
