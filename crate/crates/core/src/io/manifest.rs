//! Provenance manifests as JSON Lines: a header object on the first line,
//! then one [`AugmentRecord`] per line.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::AugmentConfig;
use crate::error::{Error, Result};
use crate::record::AugmentRecord;

pub const MANIFEST_FORMAT: &str = "style-replace-manifest";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub master_seed: u64,
    pub config: AugmentConfig,
    pub provider: String,
    /// Copies per original; 0 with `in_place` set when originals were gated.
    pub ratio: u32,
    #[serde(default)]
    pub in_place: bool,
    /// Free-form description of the invocation (the CLI stores its flags here).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invocation: Option<serde_json::Value>,
}

impl ManifestHeader {
    pub fn new(master_seed: u64, config: AugmentConfig, provider: impl Into<String>, ratio: u32) -> Self {
        Self {
            format: MANIFEST_FORMAT.into(),
            version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            master_seed,
            config,
            provider: provider.into(),
            ratio,
            in_place: false,
            invocation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub header: ManifestHeader,
    pub records: Vec<AugmentRecord>,
}

impl Manifest {
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::ManifestParse {
            line: 1,
            message: "missing header".into(),
        })?;
        let header: ManifestHeader =
            serde_json::from_str(first).map_err(|e| Error::ManifestParse {
                line: 1,
                message: e.to_string(),
            })?;
        if header.format != MANIFEST_FORMAT {
            return Err(Error::ManifestParse {
                line: 1,
                message: format!("unknown format `{}`", header.format),
            });
        }
        if header.version > MANIFEST_VERSION {
            return Err(Error::ManifestParse {
                line: 1,
                message: format!("unsupported version {}", header.version),
            });
        }
        let records = lines
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| Error::ManifestParse {
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { header, records })
    }
}

pub fn write_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    f.write_all(manifest.to_jsonl().as_bytes())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Manifest::parse(&text)
}
