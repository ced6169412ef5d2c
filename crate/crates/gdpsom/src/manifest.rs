//! Run manifests: everything needed to repeat a `run` exactly.

use std::fs;
use std::path::Path;

use gdpsom_core::pipeline::PipelineConfig;
use serde::{Deserialize, Serialize};

use crate::{sha256_hex, Error, Result};

pub const MANIFEST_SCHEMA: &str = "gdpsom.run-manifest";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    /// `train` or `test`, as given on the command line (before any swap).
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub version: u32,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    /// Fully resolved configuration, defaults included.
    pub config: PipelineConfig,
    pub inputs: Vec<InputFile>,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(config: &PipelineConfig, inputs: Vec<InputFile>, outputs: Vec<OutputFile>) -> Self {
        RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            version: crate::documents::DOCUMENT_VERSION,
            tool_version: crate::VERSION.into(),
            command: "run".into(),
            seed: config.som.seed,
            config: config.clone(),
            inputs,
            outputs,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: RunManifest = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.into(),
            source,
        })?;
        if manifest.schema != MANIFEST_SCHEMA || manifest.version != crate::documents::DOCUMENT_VERSION {
            return Err(Error::Schema {
                path: path.into(),
                expected: MANIFEST_SCHEMA,
                version: crate::documents::DOCUMENT_VERSION,
                found: manifest.schema,
                found_version: manifest.version,
            });
        }
        Ok(manifest)
    }

    pub fn input(&self, role: &str) -> Option<&InputFile> {
        self.inputs.iter().find(|i| i.role == role)
    }
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}
