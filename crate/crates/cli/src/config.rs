//! JSON experiment configs.
//!
//! A config is a serialized invocation: `command` names the subcommand and
//! every other key becomes the long flag of the same name. A key the
//! subcommand does not take is rejected like an unknown flag.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mdslab_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Subcommand words, e.g. `"stability converge"`.
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The equivalent argument list, program name included.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec!["mdslab".to_string()];
        args.extend(self.command.split_whitespace().map(str::to_string));
        let mut flag = |name: &str, value: String| {
            args.push(format!("--{name}"));
            args.push(value);
        };
        if let Some(s) = &self.space {
            flag("space", s.clone());
        }
        if let Some(s) = &self.sizes {
            flag("sizes", s.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
        }
        if let Some(m) = self.m {
            flag("m", m.to_string());
        }
        if let Some(p) = self.p {
            flag("p", p.to_string());
        }
        if let Some(t) = self.tol {
            flag("tol", t.to_string());
        }
        if let Some(s) = self.seed {
            flag("seed", s.to_string());
        }
        if let Some(o) = &self.out {
            flag("out", o.clone());
        }
        args
    }
}

/// SHA-256 of `bytes`, hex encoded.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
