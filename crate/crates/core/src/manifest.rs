//! Run manifests.
//!
//! Every command that writes artifacts drops a `manifest.json` next to
//! them with the exact parameters and code version needed to reproduce
//! the run.

use crate::params::ToothHeight;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub alpha: f64,
    pub h0: ToothHeight,
    pub epsilon: f64,
    pub scaling_sigma: f64,
    pub dt: f64,
    pub n_steps: u64,
    pub n_paths: u64,
    pub master_seed: u64,
    pub version: String,
    /// Command-specific extras, e.g. walk counters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counters: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        let text = self.to_json().map_err(io::Error::other)?;
        fs::write(dir.join("manifest.json"), text + "\n")
    }
}
