//! External dataset dumps (DBpedia-style), one triple per line:
//!
//! ```text
//! <http://dbpedia.org/resource/Fractal_geometry> <http://www.w3.org/2000/01/rdf-schema#label> "Fractal geometry"@en .
//! <http://dbpedia.org/resource/Fractal_geometry> <http://purl.org/dc/terms/subject> <http://dbpedia.org/resource/Category:Fractals> .
//! <http://dbpedia.org/resource/Category:Fractals> <http://www.w3.org/2004/02/skos/core#broader> <http://dbpedia.org/resource/Category:Mathematics> .
//! ```
//!
//! Only labels, primary-topic links, category memberships and `skos:broader`
//! edges are kept; other predicates are skipped.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::turtle::{decode_utf8, ParseError};
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExternalLabel {
    /// Lower-cased language tag, empty for untagged literals.
    pub lang: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExternalResource {
    pub iri: String,
    pub labels: BTreeSet<ExternalLabel>,
    /// Wikipedia pages the resource is the primary topic of.
    pub primary_topic_of: BTreeSet<String>,
    pub categories: BTreeSet<String>,
}

impl ExternalResource {
    pub fn new(iri: impl Into<String>) -> Self {
        ExternalResource {
            iri: iri.into(),
            labels: BTreeSet::new(),
            primary_topic_of: BTreeSet::new(),
            categories: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExternalDataset {
    pub resources: BTreeMap<String, ExternalResource>,
    /// `(category, broader category)` pairs.
    pub broader_edges: BTreeSet<(String, String)>,
}

impl ExternalDataset {
    fn resource(&mut self, iri: &str) -> &mut ExternalResource {
        self.resources
            .entry(iri.to_string())
            .or_insert_with(|| ExternalResource::new(iri))
    }

    pub fn category_count(&self) -> usize {
        let mut cats: BTreeSet<&str> = BTreeSet::new();
        for (c, b) in &self.broader_edges {
            cats.insert(c);
            cats.insert(b);
        }
        for r in self.resources.values() {
            cats.extend(r.categories.iter().map(String::as_str));
        }
        cats.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Term {
    Iri(String),
    Literal { text: String, lang: Option<String> },
}

pub fn parse_dataset(input: &[u8]) -> Result<ExternalDataset, Vec<ParseError>> {
    let text = decode_utf8(input).map_err(|e| vec![e])?;
    let mut dataset = ExternalDataset::default();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_line(line) {
            Ok((s, p, o)) => apply(&mut dataset, &s, &p, o),
            Err((column, message)) => errors.push(ParseError::new(i + 1, column, message)),
        }
    }
    if errors.is_empty() {
        Ok(dataset)
    } else {
        Err(errors)
    }
}

fn apply(dataset: &mut ExternalDataset, subject: &str, predicate: &str, object: Term) {
    match (predicate, object) {
        (vocab::RDFS_LABEL, Term::Literal { text, lang }) => {
            let lang = lang.unwrap_or_default();
            dataset.resource(subject).labels.insert(ExternalLabel { lang, text });
        }
        (vocab::FOAF_IS_PRIMARY_TOPIC_OF, Term::Iri(page)) => {
            dataset.resource(subject).primary_topic_of.insert(page);
        }
        (vocab::FOAF_PRIMARY_TOPIC, Term::Iri(resource)) => {
            dataset.resource(&resource).primary_topic_of.insert(subject.to_string());
        }
        (vocab::DCTERMS_SUBJECT, Term::Iri(category)) => {
            dataset.resource(subject).categories.insert(category);
        }
        (vocab::SKOS_BROADER, Term::Iri(broader)) => {
            dataset.broader_edges.insert((subject.to_string(), broader));
        }
        _ => {}
    }
}

type LineResult<T> = Result<T, (usize, String)>;

struct LineCursor<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> LineCursor<'a> {
    fn column(&self) -> usize {
        self.line[..self.pos].chars().count() + 1
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn fail<T>(&self, message: impl Into<String>) -> LineResult<T> {
        Err((self.column(), message.into()))
    }

    fn iri(&mut self) -> LineResult<String> {
        self.skip_ws();
        if !self.rest().starts_with('<') {
            return self.fail("expected <IRI>");
        }
        let Some(end) = self.rest().find('>') else {
            return self.fail("unterminated IRI");
        };
        let iri = self.rest()[1..end].to_string();
        if !is_absolute(&iri) {
            return self.fail(format!("IRI {iri:?} is not absolute"));
        }
        self.pos += end + 1;
        Ok(iri)
    }

    fn term(&mut self) -> LineResult<Term> {
        self.skip_ws();
        if !self.rest().starts_with('"') {
            return self.iri().map(Term::Iri);
        }
        let start_col = self.column();
        let mut text = String::new();
        let mut chars = self.rest().char_indices().skip(1);
        let mut end = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    end = Some(i + 1);
                    break;
                }
                '\\' => {
                    let Some((_, e)) = chars.next() else { break };
                    match e {
                        'n' => text.push('\n'),
                        't' => text.push('\t'),
                        'r' => text.push('\r'),
                        '"' => text.push('"'),
                        '\\' => text.push('\\'),
                        'u' | 'U' => {
                            let width = if e == 'u' { 4 } else { 8 };
                            let hex: String = (0..width).filter_map(|_| chars.next().map(|(_, h)| h)).collect();
                            let c = u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32);
                            match c {
                                Some(c) => text.push(c),
                                None => return Err((start_col, "bad unicode escape".into())),
                            }
                        }
                        other => return Err((start_col, format!("unknown escape \\{other}"))),
                    }
                }
                c => text.push(c),
            }
        }
        let Some(end) = end else {
            return Err((start_col, "unterminated string literal".into()));
        };
        self.pos += end;
        let mut lang = None;
        if let Some(tag_rest) = self.rest().strip_prefix('@') {
            let tag: String = tag_rest.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '-').collect();
            if tag.is_empty() {
                return self.fail("empty language tag");
            }
            self.pos += 1 + tag.len();
            lang = Some(tag.to_ascii_lowercase());
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            self.iri()?;
        }
        Ok(Term::Literal { text, lang })
    }

    fn end(&mut self) -> LineResult<()> {
        self.skip_ws();
        if !self.rest().starts_with('.') {
            return self.fail("expected '.' at end of triple");
        }
        self.pos += 1;
        self.skip_ws();
        if self.rest().is_empty() || self.rest().starts_with('#') {
            Ok(())
        } else {
            self.fail("unexpected content after '.'")
        }
    }
}

fn is_absolute(iri: &str) -> bool {
    match iri.split_once(':') {
        Some((scheme, rest)) => {
            !rest.is_empty()
                && scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
                && !iri.chars().any(char::is_whitespace)
        }
        None => false,
    }
}

fn parse_line(line: &str) -> LineResult<(String, String, Term)> {
    let mut cur = LineCursor { line, pos: 0 };
    let s = cur.iri()?;
    let p = cur.iri()?;
    let o = cur.term()?;
    cur.end()?;
    Ok((s, p, o))
}
