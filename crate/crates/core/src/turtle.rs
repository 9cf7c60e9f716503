//! Reader and writer for the Turtle subset used to store ontologies.
//!
//! The canonical form written by [`serialize_turtle`] is:
//!
//! ```text
//! @prefix ompro: <http://ontomathpro.org/ontology/> .
//! @prefix owl: <http://www.w3.org/2002/07/owl#> .
//! @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
//! @prefix skos: <http://www.w3.org/2004/02/skos/core#> .
//!
//! ompro:E1226 a owl:Class ;
//!     rdfs:label "Cauchy's inequality"@en ;
//!     rdfs:label "Неравенство Коши"@ru ;
//!     ompro:definition "..." ;
//!     .
//!
//! ompro:E1226 rdfs:subClassOf ompro:E1936 .
//! ompro:E660 ompro:P5 ompro:E444 .
//! ```
//!
//! The reader accepts somewhat more than it writes: any statement of the
//! form `subject predicate object (, object)* (; predicate object ...)* [;] .`,
//! full IRIs in place of prefixed names, and `#` comments. Blank nodes and
//! collections are not supported.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{ClassId, Edge, Lang, Label, Ontology, OntologyClass, RelationKind, Roots};
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub roots: Roots,
    /// Extra predicate IRIs mapped onto relation kinds, for files that use
    /// their own property IRIs.
    pub predicate_aliases: BTreeMap<String, RelationKind>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { roots: Roots::default(), predicate_aliases: BTreeMap::new() }
    }
}

#[derive(Debug, Clone)]
pub struct TurtleDocument {
    pub ontology: Ontology,
    pub warnings: Vec<ParseWarning>,
}

pub fn parse_turtle(input: &[u8]) -> Result<Ontology, Vec<ParseError>> {
    parse_turtle_with(input, &ParseOptions::default()).map(|doc| doc.ontology)
}

pub fn parse_turtle_with(input: &[u8], options: &ParseOptions) -> Result<TurtleDocument, Vec<ParseError>> {
    let text = decode_utf8(input).map_err(|e| vec![e])?;
    let mut parser = Parser::new(lex(text), options);
    parser.run();
    let mut errors = std::mem::take(&mut parser.errors);
    if !errors.is_empty() {
        errors.sort_by_key(|e| (e.line, e.column));
        return Err(errors);
    }
    Ok(TurtleDocument { ontology: parser.finish(), warnings: parser.warnings })
}

pub(crate) fn decode_utf8(input: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(input).map_err(|e| {
        let valid = &input[..e.valid_up_to()];
        let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = valid.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        ParseError::new(line, column, "invalid UTF-8")
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixKw,
    A,
    PName(String, String),
    Iri(String),
    Str(String),
    LangTag(String),
    Semi,
    Comma,
    Dot,
    Error(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn lex(text: &str) -> Vec<Token> {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, column: 1 };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let mut push = |tok| tokens.push(Token { tok, line, column });
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            '#' => cur.skip_line(),
            ';' => {
                cur.bump();
                push(Tok::Semi);
            }
            ',' => {
                cur.bump();
                push(Tok::Comma);
            }
            '.' => {
                cur.bump();
                push(Tok::Dot);
            }
            '<' => {
                cur.bump();
                let mut iri = String::new();
                let mut closed = false;
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                    if c == '>' {
                        closed = true;
                        break;
                    }
                    iri.push(c);
                }
                if closed {
                    push(Tok::Iri(iri));
                } else {
                    push(Tok::Error("unterminated IRI".into()));
                }
            }
            '"' => {
                cur.bump();
                match lex_string(&mut cur) {
                    Ok(s) => push(Tok::Str(s)),
                    Err(msg) => {
                        push(Tok::Error(msg.into()));
                        cur.skip_line();
                    }
                }
            }
            '@' => {
                cur.bump();
                let mut word = String::new();
                while let Some(c) = cur.peek().filter(|&c| c.is_ascii_alphanumeric() || c == '-') {
                    cur.bump();
                    word.push(c);
                }
                if word == "prefix" {
                    push(Tok::PrefixKw);
                } else if word.is_empty() {
                    push(Tok::Error("empty language tag".into()));
                } else {
                    push(Tok::LangTag(word));
                }
            }
            c if is_name_char(c) || c == ':' => {
                let mut prefix = String::new();
                while let Some(c) = cur.peek().filter(|&c| is_name_char(c)) {
                    cur.bump();
                    prefix.push(c);
                }
                if cur.peek() == Some(':') {
                    cur.bump();
                    let mut local = String::new();
                    while let Some(c) = cur.peek().filter(|&c| is_name_char(c)) {
                        cur.bump();
                        local.push(c);
                    }
                    push(Tok::PName(prefix, local));
                } else if prefix == "a" {
                    push(Tok::A);
                } else {
                    push(Tok::Error(format!("unexpected bare word {prefix:?}").into()));
                }
            }
            other => {
                cur.bump();
                push(Tok::Error(format!("unexpected character {other:?}").into()));
            }
        }
    }
    tokens
}

fn lex_string(cur: &mut Cursor<'_>) -> Result<String, String> {
    let mut out = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') => return Err("unterminated string literal".to_string()),
            Some('"') => {
                cur.bump();
                return Ok(out);
            }
            Some('\\') => {
                cur.bump();
                out.push(unescape(cur)?);
            }
            Some(c) => {
                cur.bump();
                out.push(c);
            }
        }
    }
}

/// Reads the escape sequence following a backslash.
fn unescape(cur: &mut Cursor<'_>) -> Result<char, String> {
    let c = match cur.bump() {
        Some('"') => '"',
        Some('\\') => '\\',
        Some('\'') => '\'',
        Some('n') => '\n',
        Some('r') => '\r',
        Some('t') => '\t',
        Some(u @ ('u' | 'U')) => {
            let width = if u == 'u' { 4 } else { 8 };
            let mut hex = String::new();
            for _ in 0..width {
                match cur.bump() {
                    Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                    _ => return Err("bad unicode escape".to_string()),
                }
            }
            let code = u32::from_str_radix(&hex, 16).map_err(|e| e.to_string())?;
            char::from_u32(code).ok_or_else(|| "escape is not a unicode scalar".to_string())?
        }
        Some(other) => return Err(format!("unknown escape \\{other}")),
        None => return Err("unterminated string literal".to_string()),
    };
    Ok(c)
}

#[derive(Debug, Clone)]
enum Object {
    Iri(String),
    Literal { text: String, lang: Option<String> },
}

struct PendingClass {
    declarations: usize,
    class: OntologyClass,
}

struct Parser<'o> {
    tokens: Vec<Token>,
    pos: usize,
    options: &'o ParseOptions,
    prefixes: HashMap<String, String>,
    classes: BTreeMap<ClassId, PendingClass>,
    edges: Vec<Edge>,
    errors: Vec<ParseError>,
    warnings: Vec<ParseWarning>,
}

type Step<T> = Result<T, ParseError>;

impl<'o> Parser<'o> {
    fn new(tokens: Vec<Token>, options: &'o ParseOptions) -> Self {
        let mut prefixes: HashMap<String, String> = vocab::STANDARD_PREFIXES
            .iter()
            .map(|(p, ns)| (p.to_string(), ns.to_string()))
            .collect();
        prefixes.insert("rdf".into(), vocab::RDF.into());
        Parser {
            tokens,
            pos: 0,
            options,
            prefixes,
            classes: BTreeMap::new(),
            edges: Vec::new(),
            errors: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Step<Token> {
        match self.tokens.get(self.pos) {
            Some(Token { tok: Tok::Error(msg), line, column }) => {
                self.pos += 1;
                Err(ParseError::new(*line, *column, msg.clone()))
            }
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => {
                let (line, column) = self.tokens.last().map_or((1, 1), |t| (t.line, t.column));
                Err(ParseError::new(line, column, "unexpected end of input, expected '.'"))
            }
        }
    }

    fn run(&mut self) {
        while self.peek().is_some() {
            if let Err(e) = self.statement() {
                self.errors.push(e);
                self.recover();
            }
        }
    }

    /// Skips past the next statement terminator, unless the failing token
    /// was the terminator itself. Lexical errors met on the way are kept.
    fn recover(&mut self) {
        if self.pos > 0 && self.tokens[self.pos - 1].tok == Tok::Dot {
            return;
        }
        while let Some(t) = self.tokens.get(self.pos) {
            self.pos += 1;
            match &t.tok {
                Tok::Dot => break,
                Tok::Error(msg) => self.errors.push(ParseError::new(t.line, t.column, msg.clone())),
                _ => {}
            }
        }
    }

    fn statement(&mut self) -> Step<()> {
        let first = self.next()?;
        if first.tok == Tok::PrefixKw {
            return self.prefix_decl(&first);
        }
        let subject = self.resource(&first)?;
        loop {
            let pred_tok = self.next()?;
            let predicate = match &pred_tok.tok {
                Tok::A => vocab::RDF_TYPE.to_string(),
                _ => self.resource(&pred_tok)?,
            };
            let sep = loop {
                let obj_tok = self.next()?;
                let object = self.object(&obj_tok)?;
                self.triple(&first, &subject, &predicate, object)?;
                let sep = self.next()?;
                if sep.tok != Tok::Comma {
                    break sep;
                }
            };
            match sep.tok {
                Tok::Dot => return Ok(()),
                Tok::Semi => {
                    if matches!(self.peek().map(|t| &t.tok), Some(Tok::Dot)) {
                        self.pos += 1;
                        return Ok(());
                    }
                }
                _ => return Err(ParseError::new(sep.line, sep.column, "expected ';' or '.'")),
            }
        }
    }

    fn prefix_decl(&mut self, kw: &Token) -> Step<()> {
        let name = self.next()?;
        let Tok::PName(prefix, local) = &name.tok else {
            return Err(ParseError::new(name.line, name.column, "expected prefix name after @prefix"));
        };
        if !local.is_empty() {
            return Err(ParseError::new(name.line, name.column, "prefix name must end with ':'"));
        }
        let iri = self.next()?;
        let Tok::Iri(ns) = &iri.tok else {
            return Err(ParseError::new(iri.line, iri.column, "expected <IRI> in prefix declaration"));
        };
        let dot = self.next()?;
        if dot.tok != Tok::Dot {
            return Err(ParseError::new(kw.line, kw.column, "prefix declaration must end with '.'"));
        }
        self.prefixes.insert(prefix.clone(), ns.clone());
        Ok(())
    }

    fn resource(&self, t: &Token) -> Step<String> {
        match &t.tok {
            Tok::Iri(iri) => Ok(iri.clone()),
            Tok::PName(prefix, local) => match self.prefixes.get(prefix) {
                Some(ns) => Ok(format!("{ns}{local}")),
                None => Err(ParseError::new(t.line, t.column, format!("undeclared prefix {prefix:?}"))),
            },
            other => Err(ParseError::new(t.line, t.column, format!("expected IRI, found {other:?}"))),
        }
    }

    fn object(&mut self, t: &Token) -> Step<Object> {
        if let Tok::Str(text) = &t.tok {
            let lang = match self.peek().map(|n| &n.tok) {
                Some(Tok::LangTag(tag)) => {
                    let tag = tag.to_ascii_lowercase();
                    self.pos += 1;
                    Some(tag)
                }
                _ => None,
            };
            return Ok(Object::Literal { text: text.clone(), lang });
        }
        self.resource(t).map(Object::Iri)
    }

    fn class_id(&self, iri: &str, at: &Token) -> Step<Option<ClassId>> {
        match iri.strip_prefix(vocab::OMPRO) {
            Some(local) if local.starts_with('E') => local
                .parse()
                .map(Some)
                .map_err(|e: crate::ontology::ClassIdError| ParseError::new(at.line, at.column, e.to_string())),
            _ => Ok(None),
        }
    }

    fn pending(&mut self, id: ClassId) -> &mut PendingClass {
        self.classes
            .entry(id)
            .or_insert_with(|| PendingClass { declarations: 0, class: OntologyClass::new(id) })
    }

    fn warn(&mut self, at: &Token, message: String) {
        self.warnings.push(ParseWarning { line: at.line, message });
    }

    fn relation_for(&self, predicate: &str) -> Option<RelationKind> {
        if predicate == vocab::RDFS_SUBCLASS_OF {
            return Some(RelationKind::Isa);
        }
        if let Some(kind) = self.options.predicate_aliases.get(predicate) {
            return Some(*kind);
        }
        let local = predicate.strip_prefix(vocab::OMPRO)?.strip_prefix('P')?;
        match local.as_bytes() {
            [d @ b'1'..=b'7'] => RelationKind::from_property_number(d - b'0'),
            _ => None,
        }
    }

    fn triple(&mut self, at: &Token, subject: &str, predicate: &str, object: Object) -> Step<()> {
        let Some(id) = self.class_id(subject, at)? else {
            self.warn(at, format!("ignoring triple about non-class subject <{subject}>"));
            return Ok(());
        };

        if let Some(kind) = self.relation_for(predicate) {
            let target = match &object {
                Object::Iri(iri) => self.class_id(iri, at)?,
                Object::Literal { .. } => None,
            };
            match target {
                Some(target) => self.edges.push(Edge::new(id, kind, target)),
                None => self.warn(at, format!("ignoring {predicate} with non-class object")),
            }
            return Ok(());
        }

        match (predicate, object) {
            (vocab::RDF_TYPE, Object::Iri(ty)) if ty == vocab::OWL_CLASS => {
                self.pending(id).declarations += 1;
            }
            (vocab::RDFS_LABEL, Object::Literal { text, lang }) => {
                match lang.as_deref().map(str::parse::<Lang>) {
                    Some(Ok(lang)) => self.pending(id).class.labels.push(Label::new(lang, text)),
                    Some(Err(msg)) => self.warn(at, format!("skipping label of {id}: {msg}")),
                    None => self.warn(at, format!("skipping label of {id} without language tag")),
                }
            }
            (vocab::OMPRO_DEFINITION, Object::Literal { text, .. }) => {
                let class = &mut self.pending(id).class;
                if class.definition_text.is_none() {
                    class.definition_text = Some(text);
                }
            }
            (vocab::RDFS_IS_DEFINED_BY, Object::Iri(url)) => {
                let class = &mut self.pending(id).class;
                if class.definition_url.is_none() {
                    class.definition_url = Some(url);
                }
            }
            (vocab::RDFS_LABEL | vocab::OMPRO_DEFINITION, Object::Iri(_))
            | (vocab::RDFS_IS_DEFINED_BY, Object::Literal { .. }) => {
                return Err(ParseError::new(at.line, at.column, format!("wrong object type for <{predicate}>")));
            }
            (other, _) => self.warn(at, format!("ignoring unknown predicate <{other}>")),
        }
        Ok(())
    }

    fn finish(&mut self) -> Ontology {
        let mut builder = Ontology::builder().roots(self.options.roots);
        for (id, pending) in std::mem::take(&mut self.classes) {
            builder.add_class(pending.class);
            if pending.declarations > 1 {
                builder.mark_duplicate(id);
            }
        }
        for e in self.edges.drain(..) {
            builder.add_edge(e);
        }
        builder.build()
    }
}

pub(crate) fn escape_literal(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Writes Turtle with the `ompro:` prefix bound to `namespace`.
#[derive(Debug, Clone)]
pub struct TurtleWriter {
    namespace: String,
}

impl Default for TurtleWriter {
    fn default() -> Self {
        TurtleWriter { namespace: vocab::OMPRO.to_string() }
    }
}

impl TurtleWriter {
    pub fn with_namespace(namespace: impl Into<String>) -> Self {
        TurtleWriter { namespace: namespace.into() }
    }

    pub fn prefixes(&self, out: &mut String) {
        for (prefix, ns) in vocab::STANDARD_PREFIXES {
            let ns = if prefix == "ompro" { self.namespace.as_str() } else { ns };
            let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
        }
    }

    pub fn class_block(&self, class: &OntologyClass, out: &mut String) {
        let _ = writeln!(out, "ompro:{} a owl:Class ;", class.id);
        let mut labels: Vec<&Label> = class.labels.iter().collect();
        labels.sort();
        for l in labels {
            let _ = writeln!(out, "    rdfs:label \"{}\"@{} ;", escape_literal(&l.text), l.lang);
        }
        if let Some(text) = &class.definition_text {
            let _ = writeln!(out, "    ompro:definition \"{}\" ;", escape_literal(text));
        }
        if let Some(url) = &class.definition_url {
            let _ = writeln!(out, "    rdfs:isDefinedBy <{url}> ;");
        }
        out.push_str("    .\n");
    }

    /// One edge triple without the trailing newline.
    pub fn edge_triple(&self, e: &Edge, out: &mut String) {
        let predicate = match e.kind.property_number() {
            Some(n) => format!("ompro:P{n}"),
            None => "rdfs:subClassOf".to_string(),
        };
        let _ = write!(out, "ompro:{} {} ompro:{} .", e.subject, predicate, e.object);
    }

    pub fn ontology(&self, ontology: &Ontology) -> String {
        let mut out = String::new();
        self.prefixes(&mut out);
        for class in ontology.classes() {
            out.push('\n');
            self.class_block(class, &mut out);
        }
        if !ontology.edges().is_empty() {
            out.push('\n');
            for e in ontology.edges() {
                self.edge_triple(e, &mut out);
                out.push('\n');
            }
        }
        out
    }

    /// One class with every asserted edge touching it.
    pub fn class_fragment(&self, ontology: &Ontology, id: ClassId) -> Option<String> {
        let class = ontology.class(id)?;
        let mut out = String::new();
        self.prefixes(&mut out);
        out.push('\n');
        self.class_block(class, &mut out);
        let (outgoing, incoming) = ontology.adjacent_edges(id);
        let mut edges: Vec<Edge> = outgoing.into_iter().chain(incoming).collect();
        edges.sort();
        edges.dedup();
        if !edges.is_empty() {
            out.push('\n');
            for e in &edges {
                self.edge_triple(e, &mut out);
                out.push('\n');
            }
        }
        Some(out)
    }
}

/// Canonical serialization: classes by numeric id, labels by `(lang, text)`,
/// edges by `(subject, kind, object)`.
pub fn serialize_turtle(ontology: &Ontology) -> String {
    TurtleWriter::default().ontology(ontology)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "@prefix ompro: <http://ontomathpro.org/ontology/> .\n\
                          @prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
                          @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
                          @prefix skos: <http://www.w3.org/2004/02/skos/core#> .\n";

    fn id(n: u32) -> ClassId {
        ClassId::new(n)
    }

    #[test]
    fn synonym_labels_are_kept() {
        let doc = format!(
            "{HEADER}\nompro:E1226 a owl:Class ;\n    rdfs:label \"Cauchy's inequality\"@en ;\n    \
             rdfs:label \"Inequality of arithmetic and geometric means\"@en ;\n    \
             rdfs:label \"Неравенство Коши\"@ru ;\n    ompro:definition \"An inequality.\" ;\n    .\n"
        );
        let o = parse_turtle(doc.as_bytes()).unwrap();
        assert_eq!(o.class_count(), 1);
        assert_eq!(o.class(id(1226)).unwrap().labels.len(), 3);
    }

    #[test]
    fn subclass_triple_becomes_isa_edge() {
        let doc = format!(
            "{HEADER}ompro:E5 a owl:Class .\nompro:E6 a owl:Class .\nompro:E5 rdfs:subClassOf ompro:E6 .\n"
        );
        let o = parse_turtle(doc.as_bytes()).unwrap();
        assert!(o.edges().contains(&Edge::isa(id(5), id(6))));
        assert_eq!(o.edges().len(), 1);
    }

    #[test]
    fn property_predicates_and_full_iris() {
        let doc = "<http://ontomathpro.org/ontology/E39> <http://ontomathpro.org/ontology/P2> ompro:E213 .\n\
                   ompro:E660 ompro:P5 ompro:E444 ; ompro:P6 ompro:E444 .";
        let o = parse_turtle(doc.as_bytes()).unwrap();
        assert!(o.edges().contains(&Edge::new(id(39), RelationKind::DefinedBy, id(213))));
        assert!(o.edges().contains(&Edge::new(id(660), RelationKind::SeeAlso, id(444))));
        assert!(o.edges().contains(&Edge::new(id(660), RelationKind::Solves, id(444))));
    }

    #[test]
    fn unterminated_string_reports_its_line() {
        let mut doc = String::from(HEADER);
        doc.push_str("\nompro:E1 a owl:Class ;\n    rdfs:label \"broken@en ;\n    .\n");
        assert_eq!(doc.lines().position(|l| l.contains("broken")), Some(6));
        let errs = parse_turtle(doc.as_bytes()).unwrap_err();
        assert_eq!(errs[0].line, 7);
        assert!(errs[0].message.contains("unterminated"));
    }

    #[test]
    fn errors_are_collected_across_statements() {
        let doc = "ompro:E1 a owl:Class ;\n rdfs:label \"x\n .\nompro:E2 rdfs:subClassOf .\nompro:E3 a owl:Class .\nfoo:E4 a owl:Class .";
        let errs = parse_turtle(doc.as_bytes()).unwrap_err();
        let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 4, 6]);
    }

    #[test]
    fn unknown_predicates_are_warnings() {
        let doc = "ompro:E1 a owl:Class ;\n <http://example.org/p> \"x\" ;\n rdfs:label \"Hallo\"@de .";
        let parsed = parse_turtle_with(doc.as_bytes(), &ParseOptions::default()).unwrap();
        assert_eq!(parsed.warnings.len(), 2);
        assert_eq!(parsed.ontology.class_count(), 1);
    }

    #[test]
    fn predicate_aliases() {
        let mut options = ParseOptions::default();
        options
            .predicate_aliases
            .insert("http://example.org/solves".to_string(), RelationKind::Solves);
        let doc = "ompro:E7 <http://example.org/solves> ompro:E8 .";
        let parsed = parse_turtle_with(doc.as_bytes(), &options).unwrap();
        assert!(parsed.ontology.edges().contains(&Edge::new(id(7), RelationKind::Solves, id(8))));
    }

    #[test]
    fn malformed_class_id_is_an_error() {
        let errs = parse_turtle(b"ompro:E0 a owl:Class .").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!((errs[0].line, errs[0].column), (1, 1));
    }

    #[test]
    fn repeated_declaration_is_a_duplicate() {
        let o = parse_turtle(b"ompro:E1 a owl:Class .\nompro:E1 a owl:Class .").unwrap();
        assert!(o
            .validate(false)
            .iter()
            .any(|v| v.code == crate::ontology::ViolationCode::DuplicateId));
    }

    #[test]
    fn empty_ontology_is_prefixes_only() {
        assert_eq!(serialize_turtle(&Ontology::default()), HEADER);
    }

    #[test]
    fn canonical_output() {
        let o = Ontology::builder()
            .class(
                OntologyClass::new(id(10))
                    .with_label(Label::ru("Б"))
                    .with_label(Label::en("b \"quoted\""))
                    .with_definition_url("https://en.wikipedia.org/wiki/B"),
            )
            .class(OntologyClass::new(id(9)).with_label(Label::en("a")).with_definition("line\nbreak"))
            .edge(id(10), RelationKind::SeeAlso, id(9))
            .edge(id(10), RelationKind::Isa, id(9))
            .build();
        let expected = format!(
            "{HEADER}\nompro:E9 a owl:Class ;\n    rdfs:label \"a\"@en ;\n    ompro:definition \"line\\nbreak\" ;\n    .\n\
             \nompro:E10 a owl:Class ;\n    rdfs:label \"b \\\"quoted\\\"\"@en ;\n    rdfs:label \"Б\"@ru ;\n    \
             rdfs:isDefinedBy <https://en.wikipedia.org/wiki/B> ;\n    .\n\
             \nompro:E10 rdfs:subClassOf ompro:E9 .\nompro:E10 ompro:P5 ompro:E9 .\n"
        );
        let text = serialize_turtle(&o);
        assert_eq!(text, expected);
        assert_eq!(parse_turtle(text.as_bytes()).unwrap(), o);
    }

    #[test]
    fn object_lists() {
        let o = parse_turtle(
            "ompro:E3 a owl:Class ;\n    rdfs:label \"a\"@en , \"б\"@ru ;\n    rdfs:subClassOf ompro:E1 , ompro:E2 .".as_bytes(),
        )
        .unwrap();
        assert_eq!(o.class(id(3)).unwrap().labels.len(), 2);
        assert_eq!(o.parents(id(3)), &[id(1), id(2)]);
        assert!(parse_turtle(b"ompro:E3 rdfs:subClassOf ompro:E1 , .").is_err());
    }

    #[test]
    fn unicode_escapes() {
        let o = parse_turtle(r#"ompro:E1 rdfs:label "ét\U0001D400"@en ."#.as_bytes()).unwrap();
        assert_eq!(o.class(id(1)).unwrap().labels[0].text, "ét\u{1D400}");
    }

    #[test]
    fn invalid_utf8_position() {
        let errs = parse_turtle(b"ompro:E1 a owl:Class .\nompro:E2 \xff").unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (2, 10));
    }
}
