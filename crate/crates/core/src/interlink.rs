//! Alignment of ontology classes with an external dataset.
//!
//! A class is linked to an in-scope resource when a normalized label
//! matches in the same language, or when the class's definition link and
//! one of the resource's Wikipedia pages coincide. Links are written as
//! `skos:closeMatch` triples.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{ExternalDataset, ExternalResource};
use crate::ontology::{ClassId, Lang, Ontology, OntologyClass};
use crate::turtle::{decode_utf8, ParseError, TurtleWriter};
use crate::vocab;

/// Case-folds, trims and collapses internal whitespace. Diacritics are kept.
pub fn normalize_label(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlignmentConfig {
    pub root_category: String,
    pub max_depth: usize,
    pub use_labels: bool,
    pub use_wikipedia_refs: bool,
    pub languages: BTreeSet<Lang>,
}

impl AlignmentConfig {
    pub fn new(root_category: impl Into<String>) -> Self {
        AlignmentConfig {
            root_category: root_category.into(),
            max_depth: 5,
            use_labels: true,
            use_wikipedia_refs: true,
            languages: Lang::ALL.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchMethod {
    Label,
    WikiRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlignmentLink {
    pub class_id: ClassId,
    pub resource_iri: String,
    pub method: MatchMethod,
    /// The matched class label, or the matched Wikipedia URL.
    pub evidence: String,
}

/// A bare `skos:closeMatch` link as read back from an emitted file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CloseMatch {
    pub class_id: ClassId,
    pub resource_iri: String,
}

impl From<&AlignmentLink> for CloseMatch {
    fn from(link: &AlignmentLink) -> Self {
        CloseMatch { class_id: link.class_id, resource_iri: link.resource_iri.clone() }
    }
}

/// Resources filed under the root category or one of its sub-categories at
/// most `max_depth` narrower steps below it.
pub fn category_scope(dataset: &ExternalDataset, config: &AlignmentConfig) -> BTreeSet<String> {
    let mut narrower: HashMap<&str, Vec<&str>> = HashMap::new();
    for (cat, broader) in &dataset.broader_edges {
        narrower.entry(broader.as_str()).or_default().push(cat.as_str());
    }
    let mut depth: HashMap<&str, usize> = HashMap::from([(config.root_category.as_str(), 0)]);
    let mut queue = VecDeque::from([config.root_category.as_str()]);
    while let Some(cat) = queue.pop_front() {
        let d = depth[cat];
        if d == config.max_depth {
            continue;
        }
        for &sub in narrower.get(cat).map(Vec::as_slice).unwrap_or(&[]) {
            if !depth.contains_key(sub) {
                depth.insert(sub, d + 1);
                queue.push_back(sub);
            }
        }
    }
    dataset
        .resources
        .values()
        .filter(|r| r.categories.iter().any(|c| depth.contains_key(c.as_str())))
        .map(|r| r.iri.clone())
        .collect()
}

fn trim_url(url: &str) -> &str {
    let url = url.trim();
    url.strip_suffix('/').unwrap_or(url)
}

fn label_evidence(class: &OntologyClass, resource: &ExternalResource, config: &AlignmentConfig) -> Option<String> {
    class
        .labels
        .iter()
        .filter(|l| config.languages.contains(&l.lang))
        .find(|l| {
            let norm = normalize_label(&l.text);
            resource
                .labels
                .iter()
                .any(|rl| rl.lang == l.lang.as_str() && normalize_label(&rl.text) == norm)
        })
        .map(|l| l.text.clone())
}

fn wiki_evidence(class: &OntologyClass, resource: &ExternalResource) -> Option<String> {
    let url = class.definition_url.as_deref()?;
    let wanted = trim_url(url);
    resource
        .primary_topic_of
        .iter()
        .any(|page| trim_url(page) == wanted)
        .then(|| url.to_string())
}

/// The match predicate for a single `(class, resource)` pair. Label matches
/// take priority over Wikipedia references.
pub fn match_pair(
    class: &OntologyClass,
    resource: &ExternalResource,
    config: &AlignmentConfig,
) -> Option<AlignmentLink> {
    let make = |method, evidence| AlignmentLink {
        class_id: class.id,
        resource_iri: resource.iri.clone(),
        method,
        evidence,
    };
    if config.use_labels {
        if let Some(ev) = label_evidence(class, resource, config) {
            return Some(make(MatchMethod::Label, ev));
        }
    }
    if config.use_wikipedia_refs {
        if let Some(ev) = wiki_evidence(class, resource) {
            return Some(make(MatchMethod::WikiRef, ev));
        }
    }
    None
}

/// Checks that a link's evidence really connects its class and resource.
pub fn link_holds(link: &AlignmentLink, ontology: &Ontology, dataset: &ExternalDataset, config: &AlignmentConfig) -> bool {
    let (Some(class), Some(resource)) = (ontology.class(link.class_id), dataset.resources.get(&link.resource_iri))
    else {
        return false;
    };
    match link.method {
        MatchMethod::Label => {
            let norm = normalize_label(&link.evidence);
            class.labels.iter().any(|l| {
                config.languages.contains(&l.lang)
                    && normalize_label(&l.text) == norm
                    && resource
                        .labels
                        .iter()
                        .any(|rl| rl.lang == l.lang.as_str() && normalize_label(&rl.text) == norm)
            })
        }
        MatchMethod::WikiRef => {
            class.definition_url.as_deref().map(trim_url) == Some(trim_url(&link.evidence))
                && resource.primary_topic_of.iter().any(|p| trim_url(p) == trim_url(&link.evidence))
        }
    }
}

/// Links every class to every matching in-scope resource, sorted by
/// `(class id, resource IRI)`.
pub fn align(ontology: &Ontology, dataset: &ExternalDataset, config: &AlignmentConfig) -> Vec<AlignmentLink> {
    let scope = category_scope(dataset, config);

    let mut by_label: HashMap<(&str, String), BTreeSet<&str>> = HashMap::new();
    let mut by_page: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for iri in &scope {
        let r = &dataset.resources[iri];
        for l in &r.labels {
            by_label.entry((l.lang.as_str(), normalize_label(&l.text))).or_default().insert(iri);
        }
        for page in &r.primary_topic_of {
            by_page.entry(trim_url(page)).or_default().insert(iri);
        }
    }

    let mut links: BTreeMap<(ClassId, &str), AlignmentLink> = BTreeMap::new();
    for class in ontology.classes() {
        let mut candidates: BTreeSet<&str> = BTreeSet::new();
        if config.use_labels {
            for l in class.labels.iter().filter(|l| config.languages.contains(&l.lang)) {
                if let Some(hits) = by_label.get(&(l.lang.as_str(), normalize_label(&l.text))) {
                    candidates.extend(hits);
                }
            }
        }
        if config.use_wikipedia_refs {
            if let Some(hits) = class.definition_url.as_deref().and_then(|u| by_page.get(trim_url(u))) {
                candidates.extend(hits);
            }
        }
        for iri in candidates {
            if let Some(link) = match_pair(class, &dataset.resources[iri], config) {
                links.insert((class.id, iri), link);
            }
        }
    }
    links.into_values().collect()
}

/// Prefix declarations followed by one `skos:closeMatch` triple per link.
pub fn emit_close_match(links: &[AlignmentLink]) -> String {
    let mut out = String::new();
    TurtleWriter::default().prefixes(&mut out);
    if !links.is_empty() {
        out.push('\n');
    }
    for link in links {
        let _ = writeln!(out, "ompro:{} skos:closeMatch <{}> .", link.class_id, link.resource_iri);
    }
    out
}

/// Reads links written by [`emit_close_match`].
pub fn parse_close_match(input: &[u8]) -> Result<Vec<CloseMatch>, Vec<ParseError>> {
    let text = decode_utf8(input).map_err(|e| vec![e])?;
    let mut links = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("@prefix") {
            continue;
        }
        match parse_close_match_line(trimmed) {
            Ok(link) => links.push(link),
            Err(message) => errors.push(ParseError::new(i + 1, 1, message)),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    links.sort();
    links.dedup();
    Ok(links)
}

fn parse_close_match_line(line: &str) -> Result<CloseMatch, String> {
    let body = line.strip_suffix('.').ok_or("expected '.' at end of line")?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    let [subject, predicate, object] = parts.as_slice() else {
        return Err("expected three terms".to_string());
    };
    let local = subject
        .strip_prefix("ompro:")
        .or_else(|| subject.strip_prefix('<').and_then(|s| s.strip_suffix('>')).and_then(|s| s.strip_prefix(vocab::OMPRO)))
        .ok_or_else(|| format!("subject {subject:?} is not an ontology class"))?;
    let class_id: ClassId = local.parse().map_err(|e: crate::ontology::ClassIdError| e.to_string())?;
    let close_match = format!("<{}>", vocab::SKOS_CLOSE_MATCH);
    if *predicate != "skos:closeMatch" && *predicate != close_match {
        return Err(format!("unexpected predicate {predicate:?}"));
    }
    let iri = object
        .strip_prefix('<')
        .and_then(|o| o.strip_suffix('>'))
        .ok_or_else(|| format!("object {object:?} is not an IRI"))?;
    Ok(CloseMatch { class_id, resource_iri: iri.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ExternalLabel;
    use crate::ontology::{Label, OntologyClass};

    fn id(n: u32) -> ClassId {
        ClassId::new(n)
    }

    fn resource(iri: &str, cat: &str, labels: &[(&str, &str)]) -> ExternalResource {
        let mut r = ExternalResource::new(iri);
        r.categories.insert(cat.to_string());
        for (lang, text) in labels {
            r.labels.insert(ExternalLabel { lang: lang.to_string(), text: text.to_string() });
        }
        r
    }

    fn chain_dataset(len: usize) -> ExternalDataset {
        let mut d = ExternalDataset::default();
        for i in 1..=len {
            d.broader_edges.insert((format!("cat:{i}"), format!("cat:{}", i - 1)));
            let r = resource(&format!("res:{i}"), &format!("cat:{i}"), &[]);
            d.resources.insert(r.iri.clone(), r);
        }
        let r = resource("res:0", "cat:0", &[]);
        d.resources.insert(r.iri.clone(), r);
        d
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_label("  Fractal   Geometry "), "fractal geometry");
        assert_eq!(normalize_label("МЕТРИЧЕСКАЯ геометрия"), "метрическая геометрия");
        assert_eq!(normalize_label("fractal geometry"), "fractal geometry");
        assert_eq!(normalize_label("Théorème\tde  Gauß"), "théorème de gauß");
    }

    #[test]
    fn depth_limit() {
        let d = chain_dataset(6);
        let mut config = AlignmentConfig::new("cat:0");
        config.max_depth = 0;
        assert_eq!(category_scope(&d, &config), BTreeSet::from(["res:0".to_string()]));
        config.max_depth = 5;
        let scope = category_scope(&d, &config);
        assert!(scope.contains("res:5") && !scope.contains("res:6"));
        config.max_depth = 6;
        assert!(category_scope(&d, &config).contains("res:6"));
    }

    #[test]
    fn label_and_wiki_links() {
        let o = Ontology::builder()
            .class(OntologyClass::new(id(5)).with_label(Label::en("Fractal geometry")))
            .class(
                OntologyClass::new(id(213))
                    .with_label(Label::en("Connectedness"))
                    .with_definition_url("https://en.wikipedia.org/wiki/Connectedness"),
            )
            .build();
        let mut d = ExternalDataset::default();
        d.resources.insert("r:fg".into(), resource("r:fg", "cat:m", &[("en", "fractal  Geometry")]));
        let mut conn = resource("r:cs", "cat:m", &[("en", "Connected space")]);
        conn.primary_topic_of.insert("https://en.wikipedia.org/wiki/Connectedness/".into());
        d.resources.insert("r:cs".into(), conn);
        d.resources.insert("r:ru".into(), resource("r:ru", "cat:m", &[("ru", "Fractal geometry")]));

        let config = AlignmentConfig::new("cat:m");
        let links = align(&o, &d, &config);
        assert_eq!(links.len(), 2);
        assert_eq!(links[0].class_id, id(5));
        assert_eq!(links[0].method, MatchMethod::Label);
        assert_eq!(links[1].class_id, id(213));
        assert_eq!(links[1].method, MatchMethod::WikiRef);
        assert!(links.iter().all(|l| link_holds(l, &o, &d, &config)));
    }

    #[test]
    fn one_class_two_resources() {
        let o = Ontology::builder()
            .class(OntologyClass::new(id(7)).with_label(Label::en("Set")))
            .build();
        let mut d = ExternalDataset::default();
        d.resources.insert("r:a".into(), resource("r:a", "cat:m", &[("en", "Set")]));
        d.resources.insert("r:b".into(), resource("r:b", "cat:m", &[("en", "set")]));
        let links = align(&o, &d, &AlignmentConfig::new("cat:m"));
        assert_eq!(links.len(), 2);
    }

    #[test]
    fn close_match_output() {
        let header = "@prefix ompro: <http://ontomathpro.org/ontology/> .\n\
                      @prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
                      @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
                      @prefix skos: <http://www.w3.org/2004/02/skos/core#> .\n";
        assert_eq!(emit_close_match(&[]), header);
        let link = AlignmentLink {
            class_id: id(14),
            resource_iri: "http://dbpedia.org/resource/Metric_geometry".into(),
            method: MatchMethod::Label,
            evidence: "Metric geometry".into(),
        };
        let text = emit_close_match(std::slice::from_ref(&link));
        assert_eq!(
            text,
            format!("{header}\nompro:E14 skos:closeMatch <http://dbpedia.org/resource/Metric_geometry> .\n")
        );
        assert_eq!(parse_close_match(text.as_bytes()).unwrap(), vec![CloseMatch::from(&link)]);
    }

    #[test]
    fn close_match_parse_errors() {
        let errs = parse_close_match(b"ompro:E1 skos:closeMatch <x:y>\nompro:E1 rdfs:label <x:y> .").unwrap_err();
        assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), vec![1, 2]);
    }
}
