//! JSON model files.
//!
//! ```text
//! { "format": "landcover-svm", "version": 1, "kind": "multiclass" | "ensemble", "model": { ... } }
//! ```
//!
//! Floats are written in shortest round-trip form, so loading reproduces every
//! coefficient exactly and save → load → save is byte-stable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleModel;
use crate::error::{Error, Result};
use crate::multiclass::MulticlassModel;

pub const FORMAT: &str = "landcover-svm";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "lowercase")]
pub enum ModelFile {
    Multiclass(MulticlassModel),
    Ensemble(EnsembleModel),
}

impl ModelFile {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelFile::Multiclass(m) => m.validate(),
            ModelFile::Ensemble(e) => e.validate(),
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            format: &'a str,
            version: u32,
            #[serde(flatten)]
            body: &'a ModelFile,
        }
        let mut s = serde_json::to_string_pretty(&Out {
            format: FORMAT,
            version: VERSION,
            body: self,
        })
        .expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema = |path: String, message: String| Error::Schema { path, message };
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| schema(".".into(), e.to_string()))?;
        match value.get("format").and_then(|f| f.as_str()) {
            Some(FORMAT) => {}
            other => {
                return Err(schema(
                    "format".into(),
                    format!("expected \"{FORMAT}\", found {other:?}"),
                ))
            }
        }
        let version = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| schema("version".into(), "missing or not an integer".into()))?;
        if version != u64::from(VERSION) {
            return Err(Error::VersionMismatch {
                expected: VERSION,
                found: u32::try_from(version).unwrap_or(u32::MAX),
            });
        }
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .map(str::to_string);
        let model = value
            .get("model")
            .cloned()
            .ok_or_else(|| schema("model".into(), "missing field `model`".into()))?;
        let body = match kind.as_deref() {
            Some("multiclass") => ModelFile::Multiclass(
                serde_path_to_error::deserialize(model)
                    .map_err(|e| schema(format!("model.{}", e.path()), e.inner().to_string()))?,
            ),
            Some("ensemble") => ModelFile::Ensemble(
                serde_path_to_error::deserialize(model)
                    .map_err(|e| schema(format!("model.{}", e.path()), e.inner().to_string()))?,
            ),
            other => {
                return Err(schema(
                    "kind".into(),
                    format!("expected \"multiclass\" or \"ensemble\", found {other:?}"),
                ))
            }
        };
        if let Some(extra) = value.as_object().and_then(|o| {
            o.keys()
                .find(|k| !["format", "version", "kind", "model"].contains(&k.as_str()))
        }) {
            return Err(schema(extra.clone(), "unknown field".into()));
        }
        body.validate()
            .map_err(|e| schema("model".into(), e.to_string()))?;
        Ok(body)
    }
}

impl From<MulticlassModel> for ModelFile {
    fn from(m: MulticlassModel) -> Self {
        ModelFile::Multiclass(m)
    }
}

impl From<EnsembleModel> for ModelFile {
    fn from(e: EnsembleModel) -> Self {
        ModelFile::Ensemble(e)
    }
}

pub fn save_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelFile::from_json(&text)
}
