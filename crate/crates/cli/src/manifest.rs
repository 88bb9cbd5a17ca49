//! Flat `key=value` run manifests.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// Record of one command invocation: the command line, resolved settings,
/// input checksums, seed, version and wall-clock duration.
#[derive(Debug, Clone)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
    started: Instant,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let argv: Vec<String> = std::env::args().collect();
        let mut m = Self {
            entries: Vec::new(),
            started: Instant::now(),
        };
        m.push("version", ARTIFACT_VERSION);
        m.push("command", command);
        m.push("argv", argv.join(" "));
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace(['\n', '\r'], " ");
        self.entries.push((key.to_string(), value));
    }

    pub fn push_checksum(&mut self, key: &str, path: &Path) -> Result<()> {
        let sum = sha256_file(path)?;
        self.push(&format!("checksum.{key}"), sum);
        Ok(())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out.push_str(&format!("duration_secs={:.3}\n", self.started.elapsed().as_secs_f64()));
        out
    }

    /// Writes to `path`, or to standard error when `path` is `None`.
    pub fn finish(&self, path: Option<&Path>) -> Result<()> {
        let text = self.render();
        match path {
            Some(p) => fs::write(p, text).with_context(|| format!("writing manifest {}", p.display())),
            None => {
                let mut err = std::io::stderr().lock();
                writeln!(err, "# manifest")?;
                err.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

/// Parses a manifest into its key/value pairs.
pub fn read_manifest(path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    let mut map = HashMap::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), k + 1);
        };
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("d.txt");
        fs::write(&data, "abc").unwrap();
        let mut m = RunManifest::new("train");
        m.push("flag.seed", 7);
        m.push("flag.note", "two\nlines");
        m.push_checksum("data", &data).unwrap();
        let path = dir.path().join("m.manifest");
        m.finish(Some(&path)).unwrap();
        let map = read_manifest(&path).unwrap();
        assert_eq!(map["flag.seed"], "7");
        assert_eq!(map["flag.note"], "two lines");
        assert_eq!(
            map["checksum.data"],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert!(map.contains_key("duration_secs"));
        assert_eq!(map["version"], ARTIFACT_VERSION);
    }
}
