//! Experiment configuration: JSON file, dotted-path overrides and flags,
//! merged in that order into one validated structure.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Rician,
    Rayleigh,
    Nakagami,
    Moments,
}

/// Fading law and SNR. `K_dB` for Rician (and matched Nakagami when `m`
/// is absent), `m` for Nakagami, `alpha1` for a moments-only channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ChannelBlock {
    pub kind: ChannelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub K_dB: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    pub gamma_dB: f64,
}

impl Default for ChannelBlock {
    fn default() -> Self {
        ChannelBlock {
            kind: ChannelKind::Rayleigh,
            K_dB: None,
            m: None,
            alpha1: None,
            gamma_dB: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Moments,
    Robust,
    Mindist,
    Ask,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct DesignBlock {
    pub method: Method,
    pub L: usize,
    pub epsilon: f64,
    pub budget: f64,
    /// Half-width of the K and SNR uncertainty, robust method only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_dB: Option<f64>,
    /// Constellation file written by `design`; replaces the design step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<PathBuf>,
}

impl Default for DesignBlock {
    fn default() -> Self {
        DesignBlock {
            method: Method::Exact,
            L: 4,
            epsilon: 1e-6,
            budget: 1.0,
            a_dB: None,
            artifact: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Energy,
    NoncoherentMl,
    AskMl,
    PilotPam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct SimBlock {
    #[serde(deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    pub symbols: u64,
    pub seed: u64,
    pub shards: usize,
    pub scheme: SchemeKind,
    pub T: usize,
    pub T_l: usize,
    pub pilot_amp: f64,
    /// Channel the symbols actually cross; designs and decoders keep
    /// assuming the top-level channel block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_channel: Option<ChannelBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_bit_errors: Option<u64>,
    pub target_ber: f64,
    pub n_max: usize,
    pub trials: usize,
    pub bins: usize,
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock {
            n: vec![100],
            symbols: 100_000,
            seed: 0,
            shards: 1,
            scheme: SchemeKind::Energy,
            T: 1,
            T_l: 0,
            pilot_amp: 1.0,
            true_channel: None,
            min_bit_errors: None,
            target_ber: 1e-3,
            n_max: 2048,
            trials: 10_000,
            bins: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default)]
    pub channel: ChannelBlock,
    #[serde(default)]
    pub design: DesignBlock,
    #[serde(default)]
    pub sim: SimBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl ExperimentConfig {
    /// Canonical JSON used for the echo and the hash.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.to_value()).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Accepts a bare count where a list is expected.
fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(n) => vec![n],
        OneOrMany::Many(v) => v,
    })
}

/// Assembles a configuration from an optional file, dotted overrides
/// (`section.field`, value) and the subcommand name.
pub fn load(path: Option<&Path>, overrides: &[(String, String)], command: &str) -> Result<ExperimentConfig, CliError> {
    let mut value = serde_json::to_value(ExperimentConfig::default()).expect("defaults serialize");
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let file: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if !file.is_object() {
            return Err(CliError::Config(format!("{}: top level must be an object", path.display())));
        }
        merge(&mut value, file);
    }
    for (key, raw) in overrides {
        set_path(&mut value, key, parse_scalar(raw))?;
    }
    let mut config: ExperimentConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner()))
    })?;
    match &config.command {
        Some(c) if c != command => {
            return Err(CliError::Config(format!(
                "command: config names `{c}` but the subcommand is `{command}`"
            )))
        }
        _ => config.command = Some(command.to_string()),
    }
    Ok(config)
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

/// JSON when it parses, a list when comma-separated, a string otherwise.
fn parse_scalar(raw: &str) -> Value {
    if let Ok(v) = serde_json::from_str(raw) {
        return v;
    }
    if raw.contains(',') {
        return Value::Array(raw.split(',').map(|s| parse_scalar(s.trim())).collect());
    }
    Value::String(raw.to_string())
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("--{key}: malformed field path")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("--{key}: `{part}` is not a section")))?;
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
    }
    node.as_object_mut()
        .ok_or_else(|| CliError::Config(format!("--{key}: parent is not a section")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
