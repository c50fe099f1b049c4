//! Plain-text record written next to every output artifact.

use std::fmt;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: Option<u64>,
    pub params: Vec<(String, String)>,
    /// `(path, sha256 hex)` for every input file.
    pub inputs: Vec<(String, String)>,
    pub version: String,
    pub duration_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `out.drm` -> `out.drm.manifest.txt`.
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.txt");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn new(command_line: Vec<String>) -> Self {
        Self { command_line, version: env!("CARGO_PKG_VERSION").to_owned(), ..Self::default() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) -> &mut Self {
        self.inputs.push((path.display().to_string(), sha256_hex(bytes)));
        self
    }

    pub fn write_next_to(&self, artifact: &Path) -> std::io::Result<()> {
        std::fs::write(manifest_path(artifact), self.to_string())
    }
}

fn quote(arg: &str) -> String {
    if !arg.is_empty() && arg.chars().all(|c| c.is_ascii_alphanumeric() || "-_./,=:+".contains(c)) {
        arg.to_owned()
    } else {
        format!("'{}'", arg.replace('\'', "'\\''"))
    }
}

impl fmt::Display for RunManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cmd: Vec<String> = self.command_line.iter().map(|a| quote(a)).collect();
        writeln!(f, "command: {}", cmd.join(" "))?;
        writeln!(f, "version: {}", self.version)?;
        match self.seed {
            Some(seed) => writeln!(f, "seed: {seed}")?,
            None => writeln!(f, "seed: -")?,
        }
        for (k, v) in &self.params {
            writeln!(f, "param {k}: {v}")?;
        }
        for (path, digest) in &self.inputs {
            writeln!(f, "input {path}: sha256 {digest}")?;
        }
        writeln!(f, "duration_seconds: {:.3}", self.duration_seconds)
    }
}
