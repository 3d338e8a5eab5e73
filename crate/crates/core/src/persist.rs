//! Trace directories and experiment manifests.
//!
//! A trace directory holds the schedule, one `DYCX` file per step, the
//! choice encoding and a manifest listing every file with its SHA-256:
//!
//! ```text
//! schedule.toml
//! level0.dycx ... level<depth>.dycx
//! choices.txt
//! manifest.txt
//! ```
//!
//! All files are written from canonical forms, so regenerating from the
//! manifest's seed and schedule gives byte-identical output.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dyadic::{codec, DyadicError};
use crate::sponge::{decode_choices, encode_choices, generate, replay, GenerationTrace, Schedule, SpongeError, DEFAULT_BUDGET};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const SCHEDULE_FILE: &str = "schedule.toml";
pub const CHOICES_FILE: &str = "choices.txt";
const MAGIC: &str = "MANIFEST 1";

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest: {0}")]
    Parse(String),
    #[error("trace directory is inconsistent: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Sponge(#[from] SpongeError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What was run and what it wrote. Parameters are kept sorted so the text
/// form, and hence [`ExperimentManifest::digest`], is canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentManifest {
    pub command: String,
    pub tool_version: String,
    pub schedule_digest: Option<String>,
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub parameters: BTreeMap<String, String>,
    /// `(file name, SHA-256)` in write order.
    pub outputs: Vec<(String, String)>,
}

impl ExperimentManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn add_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.push((name.to_string(), sha256_hex(bytes)));
    }

    pub fn digest(&self) -> String {
        sha256_hex(self.to_string().as_bytes())
    }

    pub fn parse(text: &str) -> Result<Self, PersistError> {
        let bad = |n: usize, msg: &str| PersistError::Parse(format!("line {}: {msg}", n + 1));
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            _ => return Err(bad(0, "bad header")),
        }
        let mut m = Self::default();
        let mut seen_command = false;
        for (n, line) in lines {
            let (key, rest) = line.split_once(' ').ok_or_else(|| bad(n, "expected `key value`"))?;
            match key {
                "command" => {
                    m.command = rest.to_string();
                    seen_command = true;
                }
                "version" => m.tool_version = rest.to_string(),
                "schedule" => m.schedule_digest = Some(rest.to_string()),
                "seed" => m.seed = Some(rest.parse().map_err(|_| bad(n, "bad seed"))?),
                "depth" => m.depth = Some(rest.parse().map_err(|_| bad(n, "bad depth"))?),
                "param" => {
                    let (k, v) = rest.split_once(' ').ok_or_else(|| bad(n, "expected `param key value`"))?;
                    m.parameters.insert(k.to_string(), v.to_string());
                }
                "output" => {
                    let (h, name) = rest.split_once(' ').ok_or_else(|| bad(n, "expected `output hash name`"))?;
                    if h.len() != 64 || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
                        return Err(bad(n, "bad hash"));
                    }
                    m.outputs.push((name.to_string(), h.to_string()));
                }
                _ => return Err(bad(n, "unknown key")),
            }
        }
        if !seen_command {
            return Err(PersistError::Parse("missing command".into()));
        }
        Ok(m)
    }
}

impl fmt::Display for ExperimentManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{MAGIC}")?;
        writeln!(f, "command {}", self.command)?;
        writeln!(f, "version {}", self.tool_version)?;
        if let Some(d) = &self.schedule_digest {
            writeln!(f, "schedule {d}")?;
        }
        if let Some(s) = self.seed {
            writeln!(f, "seed {s}")?;
        }
        if let Some(d) = self.depth {
            writeln!(f, "depth {d}")?;
        }
        for (k, v) in &self.parameters {
            writeln!(f, "param {k} {v}")?;
        }
        for (name, h) in &self.outputs {
            writeln!(f, "output {h} {name}")?;
        }
        Ok(())
    }
}

pub fn level_file(step: usize) -> String {
    format!("level{step}.dycx")
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), PersistError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| PersistError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read(dir: &Path, name: &str) -> Result<String, PersistError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|source| PersistError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// File contents of a trace directory, manifest last, as written by
/// [`write_trace`].
pub fn trace_files(trace: &GenerationTrace) -> Vec<(String, String)> {
    let mut files = vec![(SCHEDULE_FILE.to_string(), trace.schedule.to_toml())];
    for (i, c) in trace.complexes.iter().enumerate() {
        files.push((level_file(i), codec::encode(c)));
    }
    files.push((CHOICES_FILE.to_string(), encode_choices(&trace.replay_choice_encoding())));
    let mut manifest = ExperimentManifest::new("generate");
    manifest.schedule_digest = Some(trace.schedule.digest());
    manifest.seed = Some(trace.seed);
    manifest.depth = Some(trace.depth());
    for (name, text) in &files {
        manifest.add_output(name, text.as_bytes());
    }
    files.push((MANIFEST_FILE.to_string(), manifest.to_string()));
    files
}

/// Writes the trace into `dir`, creating it if needed.
pub fn write_trace(dir: &Path, trace: &GenerationTrace) -> Result<ExperimentManifest, PersistError> {
    fs::create_dir_all(dir).map_err(|source| PersistError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let files = trace_files(trace);
    for (name, text) in &files {
        write(dir, name, text.as_bytes())?;
    }
    let (_, manifest) = files.last().expect("manifest");
    ExperimentManifest::parse(manifest)
}

/// Loads a trace directory and checks it end to end: file hashes against the
/// manifest, the schedule digest, and that replaying the choices rebuilds
/// every complex.
pub fn read_trace(dir: &Path) -> Result<GenerationTrace, PersistError> {
    let manifest = ExperimentManifest::parse(&read(dir, MANIFEST_FILE)?)?;
    for (name, hash) in &manifest.outputs {
        if name.contains(['/', '\\']) {
            return Err(PersistError::Mismatch(format!("output {name:?} is not a plain file name")));
        }
        if sha256_hex(read(dir, name)?.as_bytes()) != *hash {
            return Err(PersistError::Mismatch(format!("{name} does not match its recorded hash")));
        }
    }
    let schedule = Schedule::from_toml(&read(dir, SCHEDULE_FILE)?)?;
    if manifest.schedule_digest.as_deref() != Some(schedule.digest().as_str()) {
        return Err(PersistError::Mismatch("schedule digest differs from the manifest".into()));
    }
    let (Some(seed), Some(depth)) = (manifest.seed, manifest.depth) else {
        return Err(PersistError::Parse("a trace manifest needs seed and depth".into()));
    };
    let complexes = (0..=depth)
        .map(|i| Ok(codec::decode(&read(dir, &level_file(i))?)?))
        .collect::<Result<Vec<_>, PersistError>>()?;
    let choices = decode_choices(&read(dir, CHOICES_FILE)?)?;
    if replay(&schedule, &choices)? != complexes {
        return Err(PersistError::Mismatch("choice encoding does not rebuild the complexes".into()));
    }
    Ok(GenerationTrace {
        schedule,
        seed,
        complexes,
    })
}

/// Regenerates from the manifest's seed, depth and schedule and compares
/// every file byte for byte. Returns the names of files that differ.
pub fn reproduce(dir: &Path) -> Result<Vec<String>, PersistError> {
    let manifest = ExperimentManifest::parse(&read(dir, MANIFEST_FILE)?)?;
    let schedule = Schedule::from_toml(&read(dir, SCHEDULE_FILE)?)?;
    let (Some(seed), Some(depth)) = (manifest.seed, manifest.depth) else {
        return Err(PersistError::Parse("a trace manifest needs seed and depth".into()));
    };
    let fresh = generate(&schedule, seed, depth, DEFAULT_BUDGET)?;
    let mut differ = Vec::new();
    for (name, text) in trace_files(&fresh) {
        match read(dir, &name) {
            Ok(old) if old == text => {}
            _ => differ.push(name),
        }
    }
    Ok(differ)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_trace(seed: u64) -> GenerationTrace {
        let s = Schedule::toy(&[(1, 1), (1, 2), (1, 2)], &[1, 1, 1]).unwrap();
        generate(&s, seed, 2, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = ExperimentManifest::new("mc-probability").param("trials", 100).param("budget", 5);
        m.seed = Some(9);
        m.add_output("out.txt", b"hello");
        let text = m.to_string();
        assert!(text.find("param budget").unwrap() < text.find("param trials").unwrap());
        let back = ExperimentManifest::parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.digest(), m.digest());
        assert!(ExperimentManifest::parse("MANIFEST 1\nseed 3\n").is_err());
        assert!(ExperimentManifest::parse("MANIFEST 2\ncommand x\n").is_err());
    }

    #[test]
    fn trace_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = toy_trace(7);
        let m = write_trace(dir.path(), &t).unwrap();
        assert_eq!(m.outputs.len(), 5);
        assert_eq!(read_trace(dir.path()).unwrap(), t);
        assert!(reproduce(dir.path()).unwrap().is_empty());
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        write_trace(dir.path(), &toy_trace(3)).unwrap();
        let path = dir.path().join(level_file(2));
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replace("count", "count ")).unwrap();
        assert!(matches!(read_trace(dir.path()), Err(PersistError::Mismatch(_))));
        assert_eq!(reproduce(dir.path()).unwrap(), vec![level_file(2)]);
    }
}
