use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use trpnet::{GeometrySpec, PhysicalConstants};

use crate::args::Command;

/// Everything needed to reproduce a run's output files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub argv: Vec<String>,
    pub config: Command,
    pub constants: PhysicalConstants,
    pub geometry: Option<GeometrySpec>,
    pub n_dipoles: Option<usize>,
    pub disorder: Option<DisorderRecord>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub timings_s: BTreeMap<String, f64>,
    pub input_hashes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DisorderRecord {
    pub widths: Vec<f64>,
    pub seed: u64,
    pub realizations: Vec<u64>,
}

impl RunManifest {
    pub fn new(config: Command, constants: PhysicalConstants) -> Self {
        let tolerances = [
            ("sum_rule_relative", trpnet::spectrum::SUM_RULE_TOLERANCE),
            ("min_c_norm", trpnet::spectrum::MIN_C_NORM),
            ("survival_imag", trpnet::spectrum::SURVIVAL_IMAG_TOLERANCE),
            ("disorder_qy_relative_at_w200", 0.10),
            ("approx_centriole_factor", 2.0),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            argv: std::env::args().collect(),
            config,
            constants,
            geometry: None,
            n_dipoles: None,
            disorder: None,
            tolerances,
            outputs: Vec::new(),
            timings_s: BTreeMap::new(),
            input_hashes: BTreeMap::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        trpnet::io::write_atomic(path, text.as_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))?)
    }
}
