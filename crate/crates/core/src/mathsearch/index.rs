use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use super::corpus::Corpus;
use crate::ontology::{hex, ClassId, Ontology};

/// Concept to symbol-occurrence postings.
///
/// Postings are positions in [`Corpus::symbols`], ascending, which is the
/// `(article, formula, symbol)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Index {
    by_concept: BTreeMap<ClassId, Vec<usize>>,
    built_against: String,
    warnings: Vec<String>,
}

impl Index {
    pub fn postings(&self, concept: ClassId) -> &[usize] {
        self.by_concept.get(&concept).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn concepts(&self) -> impl Iterator<Item = (ClassId, usize)> + '_ {
        self.by_concept.iter().map(|(c, p)| (*c, p.len()))
    }

    /// Fingerprint of the ontology the index was built against.
    pub fn built_against(&self) -> &str {
        &self.built_against
    }

    /// Concepts referenced by the corpus but absent from the ontology.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.built_against.as_bytes());
        for (concept, postings) in &self.by_concept {
            hasher.update(concept.to_string().as_bytes());
            for p in postings {
                hasher.update(p.to_le_bytes());
            }
            hasher.update(b";");
        }
        hex(&hasher.finalize())
    }
}

pub fn build_index(corpus: &Corpus, ontology: &Ontology) -> Index {
    let mut by_concept: BTreeMap<ClassId, Vec<usize>> = BTreeMap::new();
    let mut unknown: BTreeMap<ClassId, usize> = BTreeMap::new();
    for (pos, occ) in corpus.symbols().iter().enumerate() {
        if ontology.contains(occ.concept_id) {
            by_concept.entry(occ.concept_id).or_default().push(pos);
        } else {
            *unknown.entry(occ.concept_id).or_default() += 1;
        }
    }
    let warnings = unknown
        .into_iter()
        .map(|(c, n)| format!("skipped {n} occurrence(s) of unknown concept {c}"))
        .collect();
    Index { by_concept, built_against: ontology.fingerprint().to_string(), warnings }
}
