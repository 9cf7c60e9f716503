use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::corpus::{Corpus, SegmentType, TextOccurrence};
use super::index::Index;
use crate::dataset::ExternalDataset;
use crate::interlink::{normalize_label, CloseMatch};
use crate::ontology::{ClassId, Lang, MatchMode, Ontology};

pub const DEFAULT_PAGE_SIZE: usize = 20;
pub const MAX_PAGE_SIZE: usize = 100;
pub const MAX_SUGGESTIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchQuery {
    pub concept_id: ClassId,
    #[serde(default = "yes")]
    pub include_subclasses: bool,
    #[serde(default)]
    pub segment_filter: BTreeSet<SegmentType>,
    #[serde(default = "first_page")]
    pub page: usize,
    #[serde(default = "default_page_size")]
    pub page_size: usize,
}

fn yes() -> bool {
    true
}

fn first_page() -> usize {
    1
}

fn default_page_size() -> usize {
    DEFAULT_PAGE_SIZE
}

impl SearchQuery {
    pub fn new(concept_id: ClassId) -> Self {
        SearchQuery {
            concept_id,
            include_subclasses: true,
            segment_filter: BTreeSet::new(),
            page: 1,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchHit {
    pub concept_id: ClassId,
    pub symbol: String,
    pub formula_id: String,
    pub markup: String,
    pub segment_type: SegmentType,
    pub article_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchPage {
    pub total: usize,
    pub page: usize,
    pub page_size: usize,
    pub hits: Vec<SearchHit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("unknown concept {0}")]
    UnknownConcept(ClassId),
    #[error("page must be at least 1")]
    InvalidPage,
    #[error("pageSize must be between 1 and {MAX_PAGE_SIZE}")]
    InvalidPageSize,
    #[error("index was built against a different ontology")]
    StaleIndex,
}

/// Concept search with query-time isa expansion.
pub fn search(index: &Index, corpus: &Corpus, ontology: &Ontology, query: &SearchQuery) -> Result<SearchPage, SearchError> {
    if index.built_against() != ontology.fingerprint() {
        return Err(SearchError::StaleIndex);
    }
    if !ontology.contains(query.concept_id) {
        return Err(SearchError::UnknownConcept(query.concept_id));
    }
    if query.page == 0 {
        return Err(SearchError::InvalidPage);
    }
    if !(1..=MAX_PAGE_SIZE).contains(&query.page_size) {
        return Err(SearchError::InvalidPageSize);
    }

    let concepts = if query.include_subclasses {
        ontology.descendants_or_self(query.concept_id)
    } else {
        BTreeSet::from([query.concept_id])
    };
    let symbols = corpus.symbols();
    let mut positions: Vec<usize> = concepts
        .iter()
        .flat_map(|&c| index.postings(c).iter().copied())
        .filter(|&p| {
            query.segment_filter.is_empty()
                || query.segment_filter.contains(&corpus.segment_of_formula(&symbols[p].formula_id).segment_type)
        })
        .collect();
    // Positions follow the corpus's canonical occurrence order.
    positions.sort_unstable();

    let total = positions.len();
    let hits = positions
        .iter()
        .skip((query.page - 1).saturating_mul(query.page_size))
        .take(query.page_size)
        .map(|&p| {
            let occ = &symbols[p];
            let formula = corpus.formula(&occ.formula_id).expect("index refers to a loaded formula");
            let segment = corpus.segment_of_formula(&occ.formula_id);
            SearchHit {
                concept_id: occ.concept_id,
                symbol: occ.symbol.clone(),
                formula_id: occ.formula_id.clone(),
                markup: formula.markup.clone(),
                segment_type: segment.segment_type,
                article_id: segment.article_id.clone(),
            }
        })
        .collect();
    Ok(SearchPage { total, page: query.page, page_size: query.page_size, hits })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SuggestionSource {
    Ontology,
    AlignedExternal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Suggestion {
    pub display: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept_id: Option<ClassId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_iri: Option<String>,
    pub source: SuggestionSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuggestError {
    #[error("limit must be between 1 and {MAX_SUGGESTIONS}")]
    InvalidLimit,
}

/// Typeahead over ontology labels, then over labels of external resources
/// linked to the ontology by `skos:closeMatch`.
///
/// `lang = None` searches both ontology languages. External labels are
/// considered when their tag is the requested language (or en/ru for
/// `None`).
pub fn suggest(
    ontology: &Ontology,
    links: &[CloseMatch],
    dataset: &ExternalDataset,
    prefix: &str,
    lang: Option<Lang>,
    limit: usize,
) -> Result<Vec<Suggestion>, SuggestError> {
    if !(1..=MAX_SUGGESTIONS).contains(&limit) {
        return Err(SuggestError::InvalidLimit);
    }
    let needle = normalize_label(prefix);
    if needle.is_empty() {
        return Ok(Vec::new());
    }
    let langs: Vec<Lang> = match lang {
        Some(l) => vec![l],
        None => Lang::ALL.to_vec(),
    };

    // (not exact, label length, id) -> label
    let mut own: BTreeMap<ClassId, (bool, usize, String)> = BTreeMap::new();
    for &l in &langs {
        for (id, label) in ontology.find_labels(prefix, l, MatchMode::Prefix) {
            let key = (normalize_label(&label.text) != needle, label.text.chars().count(), label.text.clone());
            own.entry(id)
                .and_modify(|cur| {
                    if key < *cur {
                        *cur = key.clone();
                    }
                })
                .or_insert(key);
        }
    }
    let mut own: Vec<_> = own.into_iter().map(|(id, (inexact, len, text))| (inexact, len, id, text)).collect();
    own.sort();

    let mut external: Vec<(bool, usize, String, Option<ClassId>, String)> = Vec::new();
    let mut seen_links = BTreeSet::new();
    for link in links {
        if !seen_links.insert(link) {
            continue;
        }
        let Some(resource) = dataset.resources.get(&link.resource_iri) else { continue };
        let best = resource
            .labels
            .iter()
            .filter(|l| langs.iter().any(|lang| lang.as_str() == l.lang))
            .filter_map(|l| {
                let norm = normalize_label(&l.text);
                norm.starts_with(&needle).then(|| (norm != needle, l.text.chars().count(), l.text.clone()))
            })
            .min();
        if let Some((inexact, len, text)) = best {
            let concept = ontology.contains(link.class_id).then_some(link.class_id);
            external.push((inexact, len, link.resource_iri.clone(), concept, text));
        }
    }
    external.sort();

    let mut out = Vec::new();
    let mut seen_concepts = BTreeSet::new();
    let mut seen_iris = BTreeSet::new();
    for (_, _, id, text) in own {
        seen_concepts.insert(id);
        out.push(Suggestion { display: text, concept_id: Some(id), external_iri: None, source: SuggestionSource::Ontology });
    }
    for (_, _, iri, concept, text) in external {
        let fresh = match concept {
            Some(c) => seen_concepts.insert(c),
            None => seen_iris.insert(iri.clone()),
        };
        if fresh {
            out.push(Suggestion { display: text, concept_id: concept, external_iri: Some(iri), source: SuggestionSource::AlignedExternal });
        }
    }
    out.truncate(limit);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchedConcept {
    pub concept_id: ClassId,
    pub symbol: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArticleInfo {
    pub article_id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdf_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FormulaDetails {
    pub formula_id: String,
    pub markup: String,
    pub segment_id: String,
    pub segment_type: SegmentType,
    pub concepts: Vec<MatchedConcept>,
    pub article: ArticleInfo,
    /// Concepts annotated in the text of the hosting segment.
    pub segment_concepts: Vec<TextOccurrence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown formula {0:?}")]
pub struct UnknownFormula(pub String);

pub fn hit_details(corpus: &Corpus, formula_id: &str) -> Result<FormulaDetails, UnknownFormula> {
    let formula = corpus.formula(formula_id).ok_or_else(|| UnknownFormula(formula_id.to_string()))?;
    let segment = corpus.segment_of_formula(formula_id);
    let article = corpus.article_of_formula(formula_id);
    let concepts = corpus
        .symbols()
        .iter()
        .filter(|s| s.formula_id == formula_id)
        .map(|s| MatchedConcept { concept_id: s.concept_id, symbol: s.symbol.clone() })
        .collect();
    let segment_concepts = corpus.texts().iter().filter(|t| t.segment_id == segment.segment_id).cloned().collect();
    Ok(FormulaDetails {
        formula_id: formula.formula_id.clone(),
        markup: formula.markup.clone(),
        segment_id: segment.segment_id.clone(),
        segment_type: segment.segment_type,
        concepts,
        article: ArticleInfo {
            article_id: article.article_id.clone(),
            title: article.title.clone(),
            authors: article.authors.clone(),
            year: article.year,
            metadata_url: article.metadata_url.clone(),
            pdf_url: article.pdf_url.clone(),
        },
        segment_concepts,
    })
}
