//! Immutable bundles of everything the service answers from.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use ontohub_core::dataset::{parse_dataset, ExternalDataset};
use ontohub_core::interlink::{parse_close_match, CloseMatch};
use ontohub_core::mathsearch::{build_index, load_corpus, Corpus, Index};
use ontohub_core::reasoner::{materialize, MaterializedGraph, ReasonerConfig};
use ontohub_core::turtle::{parse_turtle_with, ParseOptions, ParseWarning};
use ontohub_core::vocab::OMPRO;
use ontohub_core::Ontology;

pub const DEFAULT_PORT: u16 = 8080;
pub const PORT_ENV: &str = "ONTOHUB_PORT";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ServiceConfig {
    #[serde(default = "default_port")]
    pub port: u32,
    pub ontology_path: PathBuf,
    pub corpus_path: PathBuf,
    pub links_path: PathBuf,
    /// External dataset whose labels feed aligned suggestions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_path: Option<PathBuf>,
    #[serde(default = "default_base_iri")]
    pub base_iri: String,
}

fn default_port() -> u32 {
    DEFAULT_PORT as u32
}

fn default_base_iri() -> String {
    OMPRO.to_string()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("port {0} is outside 1..=65535")]
    Port(u32),
    #[error("{PORT_ENV}={0:?} is not a port number")]
    PortEnv(String),
    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
}

impl ServiceConfig {
    pub fn new(ontology: impl Into<PathBuf>, corpus: impl Into<PathBuf>, links: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            port: default_port(),
            ontology_path: ontology.into(),
            corpus_path: corpus.into(),
            links_path: links.into(),
            dataset_path: None,
            base_iri: default_base_iri(),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, ConfigError> {
        let read_err = |message: String| ConfigError::Read { path: path.to_path_buf(), message };
        let bytes = fs::read(path).map_err(|e| read_err(e.to_string()))?;
        let mut config: ServiceConfig = serde_json::from_slice(&bytes).map_err(|e| read_err(e.to_string()))?;
        // Relative paths are taken from the config file's directory.
        if let Some(dir) = path.parent() {
            for p in [&mut config.ontology_path, &mut config.corpus_path, &mut config.links_path] {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
            if let Some(p) = config.dataset_path.as_mut().filter(|p| p.is_relative()) {
                *p = dir.join(&*p);
            }
        }
        Ok(config)
    }

    /// Applies `ONTOHUB_PORT` if set, then checks the port range.
    pub fn with_env(mut self, env: Option<String>) -> Result<Self, ConfigError> {
        if let Some(v) = env {
            self.port = v.trim().parse().map_err(|_| ConfigError::PortEnv(v.clone()))?;
        }
        self.checked_port()?;
        Ok(self)
    }

    pub fn checked_port(&self) -> Result<u16, ConfigError> {
        u16::try_from(self.port).ok().filter(|&p| p != 0).ok_or(ConfigError::Port(self.port))
    }

    pub fn iri(&self, id: impl std::fmt::Display) -> String {
        format!("{}{}", self.base_iri, id)
    }
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("{0}: {1}")]
    Io(PathBuf, String),
    #[error("ontology: {0}")]
    Ontology(String),
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("links: {0}")]
    Links(String),
    #[error("dataset: {0}")]
    Dataset(String),
}

/// Raw inputs for a snapshot.
#[derive(Debug, Clone, Copy)]
pub struct Sources<'a> {
    pub ontology: &'a [u8],
    pub corpus: &'a [u8],
    pub links: &'a [u8],
    pub dataset: Option<&'a [u8]>,
}

#[derive(Debug)]
pub struct Snapshot {
    pub ontology: Ontology,
    pub materialized: MaterializedGraph,
    pub corpus: Corpus,
    pub index: Index,
    pub links: Vec<CloseMatch>,
    pub dataset: ExternalDataset,
    pub warnings: Vec<ParseWarning>,
    pub content_hash: String,
}

fn joined<E: std::fmt::Display>(errors: Vec<E>) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Snapshot {
    pub fn from_sources(src: Sources<'_>) -> Result<Snapshot, SnapshotError> {
        let doc = parse_turtle_with(src.ontology, &ParseOptions::default()).map_err(|e| SnapshotError::Ontology(joined(e)))?;
        let ontology = doc.ontology;
        let materialized =
            materialize(&ontology, &ReasonerConfig::default()).map_err(|e| SnapshotError::Ontology(e.to_string()))?;
        let corpus = load_corpus(src.corpus).map_err(|e| {
            SnapshotError::Corpus(joined(e.iter().map(|e| format!("line {}: {}", e.line, e.message)).collect()))
        })?;
        let links = parse_close_match(src.links).map_err(|e| SnapshotError::Links(joined(e)))?;
        let dataset = match src.dataset {
            Some(bytes) => parse_dataset(bytes).map_err(|e| SnapshotError::Dataset(joined(e)))?,
            None => ExternalDataset::default(),
        };
        let index = build_index(&corpus, &ontology);

        let mut h = Sha256::new();
        for part in [src.ontology, src.corpus, src.links, src.dataset.unwrap_or_default()] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part);
        }
        let content_hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();

        Ok(Snapshot { ontology, materialized, corpus, index, links, dataset, warnings: doc.warnings, content_hash })
    }

    pub fn load(config: &ServiceConfig) -> Result<Snapshot, SnapshotError> {
        let read = |p: &Path| fs::read(p).map_err(|e| SnapshotError::Io(p.to_path_buf(), e.to_string()));
        let ontology = read(&config.ontology_path)?;
        let corpus = read(&config.corpus_path)?;
        let links = read(&config.links_path)?;
        let dataset = config.dataset_path.as_deref().map(read).transpose()?;
        Snapshot::from_sources(Sources { ontology: &ontology, corpus: &corpus, links: &links, dataset: dataset.as_deref() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_port_overrides_and_is_checked() {
        let c = ServiceConfig::new("o", "c", "l");
        assert_eq!(c.clone().with_env(Some("9001".into())).unwrap().port, 9001);
        assert!(c.clone().with_env(Some("0".into())).is_err());
        assert!(c.clone().with_env(Some("70000".into())).is_err());
        assert!(c.clone().with_env(Some("x".into())).is_err());
        assert_eq!(c.with_env(None).unwrap().port, 8080);
    }

    #[test]
    fn config_defaults() {
        let c: ServiceConfig =
            serde_json::from_str(r#"{"ontologyPath":"o","corpusPath":"c","linksPath":"l"}"#).unwrap();
        assert_eq!(c.base_iri, "http://ontomathpro.org/ontology/");
        assert_eq!(c.iri("E1"), "http://ontomathpro.org/ontology/E1");
        assert_eq!(c.dataset_path, None);
    }
}
