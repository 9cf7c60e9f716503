use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::ontology::ClassId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Article {
    pub article_id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdf_url: Option<String>,
}

/// Structural part of an article hosting formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentType {
    Theorem,
    Lemma,
    Definition,
    Proof,
    Corollary,
    Remark,
    Example,
    Other,
}

impl SegmentType {
    pub const ALL: [SegmentType; 8] = [
        SegmentType::Theorem,
        SegmentType::Lemma,
        SegmentType::Definition,
        SegmentType::Proof,
        SegmentType::Corollary,
        SegmentType::Remark,
        SegmentType::Example,
        SegmentType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SegmentType::Theorem => "theorem",
            SegmentType::Lemma => "lemma",
            SegmentType::Definition => "definition",
            SegmentType::Proof => "proof",
            SegmentType::Corollary => "corollary",
            SegmentType::Remark => "remark",
            SegmentType::Example => "example",
            SegmentType::Other => "other",
        }
    }

    /// Lenient mapping used while loading: unknown names become `Other`.
    pub fn from_name_lenient(name: &str) -> Self {
        name.parse().unwrap_or(SegmentType::Other)
    }
}

impl fmt::Display for SegmentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SegmentType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_lowercase();
        SegmentType::ALL
            .into_iter()
            .find(|t| t.as_str() == wanted)
            .ok_or_else(|| format!("unknown segment type {s:?}"))
    }
}

impl<'de> Deserialize<'de> for SegmentType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(SegmentType::from_name_lenient(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Segment {
    pub segment_id: String,
    pub article_id: String,
    #[serde(rename = "type")]
    pub segment_type: SegmentType,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Formula {
    pub formula_id: String,
    pub segment_id: String,
    /// TeX-style source, treated as opaque.
    pub markup: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SymbolOccurrence {
    pub formula_id: String,
    pub symbol: String,
    pub concept_id: ClassId,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TextOccurrence {
    pub segment_id: String,
    pub surface: String,
    pub concept_id: ClassId,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record {
    Article(Article),
    Segment(Segment),
    Formula(Formula),
    Symbol(SymbolOccurrence),
    Text(TextOccurrence),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CorpusErrorKind {
    Malformed,
    DanglingReference,
    DuplicateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("line {line}: {message}")]
pub struct CorpusError {
    pub line: usize,
    pub kind: CorpusErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusCounts {
    pub articles: usize,
    pub segments: usize,
    pub formulas: usize,
    pub symbols: usize,
    pub texts: usize,
}

/// An annotated article collection with referential integrity.
///
/// Symbol occurrences are kept sorted by `(article, formula, symbol,
/// concept)` and text occurrences by `(segment, surface, concept)`, so the
/// position of an occurrence is stable for a given corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    articles: BTreeMap<String, Article>,
    segments: BTreeMap<String, Segment>,
    formulas: BTreeMap<String, Formula>,
    symbols: Vec<SymbolOccurrence>,
    texts: Vec<TextOccurrence>,
}

impl Corpus {
    pub fn article(&self, id: &str) -> Option<&Article> {
        self.articles.get(id)
    }

    pub fn segment(&self, id: &str) -> Option<&Segment> {
        self.segments.get(id)
    }

    pub fn formula(&self, id: &str) -> Option<&Formula> {
        self.formulas.get(id)
    }

    pub fn articles(&self) -> impl Iterator<Item = &Article> {
        self.articles.values()
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.values()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.values()
    }

    pub fn symbols(&self) -> &[SymbolOccurrence] {
        &self.symbols
    }

    pub fn texts(&self) -> &[TextOccurrence] {
        &self.texts
    }

    pub fn counts(&self) -> CorpusCounts {
        CorpusCounts {
            articles: self.articles.len(),
            segments: self.segments.len(),
            formulas: self.formulas.len(),
            symbols: self.symbols.len(),
            texts: self.texts.len(),
        }
    }

    /// Segment hosting a formula. Panics on an unknown formula id, which
    /// cannot come out of a loaded corpus.
    pub fn segment_of_formula(&self, formula_id: &str) -> &Segment {
        &self.segments[&self.formulas[formula_id].segment_id]
    }

    pub fn article_of_formula(&self, formula_id: &str) -> &Article {
        &self.articles[&self.segment_of_formula(formula_id).article_id]
    }
}

/// Loads JSON Lines records (`article`, `segment`, `formula`, `symbol`,
/// `text`) and checks every cross-reference. References may point forward.
pub fn load_corpus(input: &[u8]) -> Result<Corpus, Vec<CorpusError>> {
    let mut errors = Vec::new();
    let text = match std::str::from_utf8(input) {
        Ok(t) => t,
        Err(e) => {
            let line = input[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
            return Err(vec![CorpusError { line, kind: CorpusErrorKind::Malformed, message: "invalid UTF-8".into() }]);
        }
    };

    let mut corpus = Corpus::default();
    let mut symbol_lines = Vec::new();
    let mut text_lines = Vec::new();
    let mut segment_lines = BTreeMap::new();
    let mut formula_lines = BTreeMap::new();

    let err = |line, kind, message: String| CorpusError { line, kind, message };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let record: Record = match serde_json::from_str(raw) {
            Ok(r) => r,
            Err(e) => {
                errors.push(err(line, CorpusErrorKind::Malformed, e.to_string()));
                continue;
            }
        };
        match record {
            Record::Article(a) => {
                if corpus.articles.contains_key(&a.article_id) {
                    errors.push(err(line, CorpusErrorKind::DuplicateId, format!("duplicate article {:?}", a.article_id)));
                } else {
                    corpus.articles.insert(a.article_id.clone(), a);
                }
            }
            Record::Segment(s) => {
                if corpus.segments.contains_key(&s.segment_id) {
                    errors.push(err(line, CorpusErrorKind::DuplicateId, format!("duplicate segment {:?}", s.segment_id)));
                } else {
                    segment_lines.insert(s.segment_id.clone(), line);
                    corpus.segments.insert(s.segment_id.clone(), s);
                }
            }
            Record::Formula(f) => {
                if corpus.formulas.contains_key(&f.formula_id) {
                    errors.push(err(line, CorpusErrorKind::DuplicateId, format!("duplicate formula {:?}", f.formula_id)));
                } else {
                    formula_lines.insert(f.formula_id.clone(), line);
                    corpus.formulas.insert(f.formula_id.clone(), f);
                }
            }
            Record::Symbol(s) => {
                if s.symbol.is_empty() {
                    errors.push(err(line, CorpusErrorKind::Malformed, "empty symbol".into()));
                } else {
                    symbol_lines.push(line);
                    corpus.symbols.push(s);
                }
            }
            Record::Text(t) => {
                text_lines.push(line);
                corpus.texts.push(t);
            }
        }
    }

    for s in corpus.segments.values() {
        if !corpus.articles.contains_key(&s.article_id) {
            errors.push(err(
                segment_lines[&s.segment_id],
                CorpusErrorKind::DanglingReference,
                format!("segment {:?} refers to missing article {:?}", s.segment_id, s.article_id),
            ));
        }
    }
    for f in corpus.formulas.values() {
        if !corpus.segments.contains_key(&f.segment_id) {
            errors.push(err(
                formula_lines[&f.formula_id],
                CorpusErrorKind::DanglingReference,
                format!("formula {:?} refers to missing segment {:?}", f.formula_id, f.segment_id),
            ));
        }
    }
    for (s, &line) in corpus.symbols.iter().zip(&symbol_lines) {
        if !corpus.formulas.contains_key(&s.formula_id) {
            errors.push(err(
                line,
                CorpusErrorKind::DanglingReference,
                format!("symbol {:?} refers to missing formula {:?}", s.symbol, s.formula_id),
            ));
        }
    }
    for (t, &line) in corpus.texts.iter().zip(&text_lines) {
        if !corpus.segments.contains_key(&t.segment_id) {
            errors.push(err(
                line,
                CorpusErrorKind::DanglingReference,
                format!("text occurrence {:?} refers to missing segment {:?}", t.surface, t.segment_id),
            ));
        }
    }

    if !errors.is_empty() {
        errors.sort_by_key(|e| e.line);
        return Err(errors);
    }

    let mut keyed: Vec<(String, SymbolOccurrence)> = std::mem::take(&mut corpus.symbols)
        .into_iter()
        .map(|s| (corpus.article_of_formula(&s.formula_id).article_id.clone(), s))
        .collect();
    keyed.sort();
    corpus.symbols = keyed.into_iter().map(|(_, s)| s).collect();
    corpus.texts.sort();
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIVE: &str = r#"{"kind":"article","articleId":"a1","title":"On iterations","authors":["A. Author"],"year":2012,"metadataUrl":"http://example.org/a1"}
{"kind":"segment","segmentId":"s1","articleId":"a1","type":"theorem","text":"Let T be ..."}
{"kind":"formula","formulaId":"f1","segmentId":"s1","markup":"x_{k+1} = T x_k"}
{"kind":"symbol","formulaId":"f1","symbol":"T","conceptId":"E1227"}
{"kind":"text","segmentId":"s1","surface":"operator","conceptId":"E1227"}
"#;

    #[test]
    fn five_record_fixture() {
        let c = load_corpus(FIVE.as_bytes()).unwrap();
        assert_eq!(
            c.counts(),
            CorpusCounts { articles: 1, segments: 1, formulas: 1, symbols: 1, texts: 1 }
        );
        assert_eq!(c.article("a1").unwrap().pdf_url, None);
        assert_eq!(c.segment_of_formula("f1").segment_type, SegmentType::Theorem);
    }

    #[test]
    fn dangling_symbol_reports_line() {
        let input = format!("{FIVE}{}\n", r#"{"kind":"symbol","formulaId":"nope","symbol":"x","conceptId":"E1"}"#);
        let errs = load_corpus(input.as_bytes()).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 6);
        assert_eq!(errs[0].kind, CorpusErrorKind::DanglingReference);
    }

    #[test]
    fn duplicates_and_malformed_lines() {
        let input = format!(
            "{FIVE}{}\n{}\n{}\n",
            r#"{"kind":"formula","formulaId":"f1","segmentId":"s1","markup":""}"#,
            r#"{"kind":"symbol","formulaId":"f1","symbol":"x","conceptId":"E0"}"#,
            r#"{"kind":"unknown"}"#
        );
        let errs = load_corpus(input.as_bytes()).unwrap_err();
        let kinds: Vec<_> = errs.iter().map(|e| (e.line, e.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                (6, CorpusErrorKind::DuplicateId),
                (7, CorpusErrorKind::Malformed),
                (8, CorpusErrorKind::Malformed)
            ]
        );
    }

    #[test]
    fn unknown_segment_type_becomes_other() {
        let input = FIVE.replace("\"theorem\"", "\"scholium\"");
        let c = load_corpus(input.as_bytes()).unwrap();
        assert_eq!(c.segment("s1").unwrap().segment_type, SegmentType::Other);
        assert!("scholium".parse::<SegmentType>().is_err());
    }

    #[test]
    fn forward_references_resolve() {
        let reversed: Vec<&str> = FIVE.lines().rev().collect();
        let c = load_corpus(reversed.join("\n").as_bytes()).unwrap();
        assert_eq!(c, load_corpus(FIVE.as_bytes()).unwrap());
    }
}
