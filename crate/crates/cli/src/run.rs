//! Output collection and the per-directory run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use optomech::config::Config;
use optomech::fixtures;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{ConfigArgs, Device, OptionalConfigArgs};
use crate::failure::Failure;

pub const MANIFEST: &str = "manifest.json";

pub struct LoadedConfig {
    pub config: Config,
    /// File path, or `builtin:<device>` for a shipped configuration.
    pub source: String,
    pub overrides: Vec<(String, String)>,
    /// SHA-256 of the canonical TOML after overrides.
    pub hash: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_overrides(raw: &[String]) -> Result<Vec<(String, String)>, Failure> {
    raw.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::config(format!("override '{s}' is not KEY=VALUE")))
        })
        .collect()
}

fn load(path: Option<&Path>, device: Option<Device>, raw: &[String]) -> Result<Option<LoadedConfig>, Failure> {
    let (text, source) = match (path, device) {
        (Some(p), _) => (
            fs::read_to_string(p).map_err(|e| Failure::config(format!("{}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        (None, Some(Device::One)) => (fixtures::DEVICE_ONE_TOML.to_string(), "builtin:device-1".to_string()),
        (None, Some(Device::Two)) => (fixtures::DEVICE_TWO_TOML.to_string(), "builtin:device-2".to_string()),
        (None, None) => return Ok(None),
    };
    let overrides = parse_overrides(raw)?;
    let config = Config::from_toml_with_overrides(&text, &overrides)?;
    let hash = sha256_hex(config.to_canonical_toml()?.as_bytes());
    Ok(Some(LoadedConfig { config, source, overrides, hash }))
}

pub fn load_config(args: &ConfigArgs) -> Result<LoadedConfig, Failure> {
    load(args.source.config.as_deref(), args.source.device, &args.overrides)?
        .ok_or_else(|| Failure::config("pass --config or --device"))
}

pub fn load_optional_config(args: &OptionalConfigArgs) -> Result<Option<LoadedConfig>, Failure> {
    load(args.config.as_deref(), args.device, &args.overrides)
}

#[derive(Serialize)]
struct OutputRecord {
    file: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    arguments: &'a [String],
    config_path: Option<&'a str>,
    parameter_overrides: BTreeMap<&'a str, &'a str>,
    output_directory: String,
    tool_version: &'a str,
    config_hash: Option<&'a str>,
    seed: Option<u64>,
    started_unix_s: u64,
    finished_unix_s: u64,
    outputs: Vec<OutputRecord>,
}

/// Files produced by one command, written together with their manifest.
pub struct Run {
    dir: PathBuf,
    command: &'static str,
    arguments: Vec<String>,
    started: u64,
    files: BTreeMap<String, Vec<u8>>,
    pub seed: Option<u64>,
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set so that whole
/// output directories can be reproduced bit for bit.
fn now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl Run {
    pub fn new(dir: &Path, command: &'static str, arguments: Vec<String>) -> Self {
        Self { dir: dir.to_path_buf(), command, arguments, started: now(), files: BTreeMap::new(), seed: None }
    }

    pub fn text(&mut self, name: &str, content: String) {
        self.files.insert(name.to_string(), content.into_bytes());
    }

    pub fn bytes(&mut self, name: &str, content: Vec<u8>) {
        self.files.insert(name.to_string(), content);
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        self.text(name, optomech::io::to_json(value)?);
        Ok(())
    }

    /// Writes every file and the manifest, then prints the file list.
    pub fn finish(self, config: Option<&LoadedConfig>) -> Result<(), Failure> {
        fs::create_dir_all(&self.dir)?;
        let mut outputs = Vec::new();
        for (name, bytes) in &self.files {
            fs::write(self.dir.join(name), bytes)?;
            outputs.push(OutputRecord { file: name.clone(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
        }
        let manifest = RunManifest {
            command: self.command,
            arguments: &self.arguments,
            config_path: config.map(|c| c.source.as_str()),
            parameter_overrides: config
                .map(|c| c.overrides.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect())
                .unwrap_or_default(),
            output_directory: self.dir.display().to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash: config.map(|c| c.hash.as_str()),
            seed: self.seed,
            started_unix_s: self.started,
            finished_unix_s: now(),
            outputs,
        };
        fs::write(self.dir.join(MANIFEST), optomech::io::to_json(&manifest)?)?;
        for name in self.files.keys() {
            println!("{}", self.dir.join(name).display());
        }
        Ok(())
    }
}
