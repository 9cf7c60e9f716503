//! In-memory ontology model.
//!
//! An [`Ontology`] holds bilingual-labeled classes and typed relation
//! instances between them. ISA edges form two taxonomies: the fields of
//! mathematics (rooted at `E1` by default) and mathematical knowledge
//! objects (rooted at `E24`). Construction is permissive so that parsed
//! input with defects can still be inspected by [`Ontology::validate`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::interlink::normalize_label;

/// Surrogate class identifier, `E` followed by a positive decimal integer.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(u32);

impl ClassId {
    /// Panics when `n` is zero.
    pub fn new(n: u32) -> Self {
        assert!(n > 0, "class ids are positive");
        ClassId(n)
    }

    pub fn number(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.0)
    }
}

impl fmt::Debug for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed class id {0:?}: expected E followed by a positive integer")]
pub struct ClassIdError(pub String);

impl FromStr for ClassId {
    type Err = ClassIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix('E').ok_or_else(|| ClassIdError(s.to_string()))?;
        let well_formed = !digits.is_empty()
            && !digits.starts_with('0')
            && digits.bytes().all(|b| b.is_ascii_digit());
        if !well_formed {
            return Err(ClassIdError(s.to_string()));
        }
        digits
            .parse::<u32>()
            .map(ClassId)
            .map_err(|_| ClassIdError(s.to_string()))
    }
}

impl Serialize for ClassId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    En,
    Ru,
}

impl Lang {
    pub const ALL: [Lang; 2] = [Lang::En, Lang::Ru];

    pub fn as_str(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Ru => "ru",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Lang::En),
            "ru" => Ok(Lang::Ru),
            other => Err(format!("unsupported language tag {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub lang: Lang,
    pub text: String,
}

impl Label {
    pub fn new(lang: Lang, text: impl Into<String>) -> Self {
        Label { lang, text: text.into() }
    }

    pub fn en(text: impl Into<String>) -> Self {
        Label::new(Lang::En, text)
    }

    pub fn ru(text: impl Into<String>) -> Self {
        Label::new(Lang::Ru, text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OntologyClass {
    pub id: ClassId,
    /// Kept sorted by `(lang, text)` and free of duplicates.
    pub labels: Vec<Label>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub definition_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub definition_url: Option<String>,
}

impl OntologyClass {
    pub fn new(id: ClassId) -> Self {
        OntologyClass { id, labels: Vec::new(), definition_text: None, definition_url: None }
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.labels.push(label);
        self.canonicalize();
        self
    }

    pub fn with_definition(mut self, text: impl Into<String>) -> Self {
        self.definition_text = Some(text.into());
        self
    }

    pub fn with_definition_url(mut self, url: impl Into<String>) -> Self {
        self.definition_url = Some(url.into());
        self
    }

    pub fn labels_in(&self, lang: Lang) -> impl Iterator<Item = &Label> {
        self.labels.iter().filter(move |l| l.lang == lang)
    }

    fn canonicalize(&mut self) {
        self.labels.sort();
        self.labels.dedup();
    }
}

/// Relation kinds. `Isa` is the sub-class relation; the rest are the
/// object properties P1 through P7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RelationKind {
    Isa,
    Defines,
    DefinedBy,
    BelongsTo,
    Contains,
    SeeAlso,
    Solves,
    SolvedBy,
}

impl RelationKind {
    pub const ALL: [RelationKind; 8] = [
        RelationKind::Isa,
        RelationKind::Defines,
        RelationKind::DefinedBy,
        RelationKind::BelongsTo,
        RelationKind::Contains,
        RelationKind::SeeAlso,
        RelationKind::Solves,
        RelationKind::SolvedBy,
    ];

    /// Property number 1..=7, `None` for `Isa`.
    pub fn property_number(self) -> Option<u8> {
        match self {
            RelationKind::Isa => None,
            RelationKind::Defines => Some(1),
            RelationKind::DefinedBy => Some(2),
            RelationKind::BelongsTo => Some(3),
            RelationKind::Contains => Some(4),
            RelationKind::SeeAlso => Some(5),
            RelationKind::Solves => Some(6),
            RelationKind::SolvedBy => Some(7),
        }
    }

    pub fn from_property_number(n: u8) -> Option<Self> {
        RelationKind::ALL.into_iter().find(|k| k.property_number() == Some(n))
    }

    /// Materialized inverse. `SeeAlso` is its own inverse; `Isa` has none.
    pub fn inverse(self) -> Option<Self> {
        match self {
            RelationKind::Isa => None,
            RelationKind::Defines => Some(RelationKind::DefinedBy),
            RelationKind::DefinedBy => Some(RelationKind::Defines),
            RelationKind::BelongsTo => Some(RelationKind::Contains),
            RelationKind::Contains => Some(RelationKind::BelongsTo),
            RelationKind::SeeAlso => Some(RelationKind::SeeAlso),
            RelationKind::Solves => Some(RelationKind::SolvedBy),
            RelationKind::SolvedBy => Some(RelationKind::Solves),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Isa => "isa",
            RelationKind::Defines => "defines",
            RelationKind::DefinedBy => "definedBy",
            RelationKind::BelongsTo => "belongsTo",
            RelationKind::Contains => "contains",
            RelationKind::SeeAlso => "seeAlso",
            RelationKind::Solves => "solves",
            RelationKind::SolvedBy => "solvedBy",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.property_number() {
            Some(n) => write!(f, "P{n}"),
            None => f.write_str("isa"),
        }
    }
}

/// A relation instance. `a isa b` is stored with `a` as subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub subject: ClassId,
    pub kind: RelationKind,
    pub object: ClassId,
}

impl Edge {
    pub fn new(subject: ClassId, kind: RelationKind, object: ClassId) -> Self {
        Edge { subject, kind, object }
    }

    pub fn isa(subject: ClassId, object: ClassId) -> Self {
        Edge::new(subject, RelationKind::Isa, object)
    }

    pub fn inverse(&self) -> Option<Edge> {
        self.kind.inverse().map(|k| Edge::new(self.object, k, self.subject))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.kind, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Roots {
    pub fields: ClassId,
    pub objects: ClassId,
    pub method: Option<ClassId>,
    pub problem: Option<ClassId>,
}

impl Default for Roots {
    fn default() -> Self {
        Roots {
            fields: ClassId(1),
            objects: ClassId(24),
            method: Some(ClassId(449)),
            problem: Some(ClassId(339)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    MissingLabel,
    MissingDefinition,
    IsaCycle,
    DanglingEndpoint,
    BadDomainRange,
    DuplicateId,
    SelfIsa,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::MissingLabel => "MISSING_LABEL",
            ViolationCode::MissingDefinition => "MISSING_DEFINITION",
            ViolationCode::IsaCycle => "ISA_CYCLE",
            ViolationCode::DanglingEndpoint => "DANGLING_ENDPOINT",
            ViolationCode::BadDomainRange => "BAD_DOMAIN_RANGE",
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::SelfIsa => "SELF_ISA",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub code: ViolationCode,
    pub subject_id: Option<ClassId>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.subject_id {
            Some(id) => write!(f, "{} {}: {}", self.code, id, self.detail),
            None => write!(f, "{}: {}", self.code, self.detail),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    pub class_count: usize,
    pub isa_edge_count: usize,
    pub other_edge_count: usize,
    pub per_kind: BTreeMap<RelationKind, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Taxonomy {
    Fields,
    Objects,
    Unrooted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Exact,
    Prefix,
}

impl FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(MatchMode::Exact),
            "prefix" => Ok(MatchMode::Prefix),
            other => Err(format!("unknown match mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("class {0} not found")]
    NotFound(ClassId),
}

/// Collects classes and edges before freezing them into an [`Ontology`].
#[derive(Debug, Clone, Default)]
pub struct OntologyBuilder {
    classes: BTreeMap<ClassId, OntologyClass>,
    duplicates: BTreeSet<ClassId>,
    edges: BTreeSet<Edge>,
    roots: Roots,
}

impl OntologyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn roots(mut self, roots: Roots) -> Self {
        self.roots = roots;
        self
    }

    pub fn set_roots(&mut self, roots: Roots) {
        self.roots = roots;
    }

    /// Adds a class. A second declaration of the same id is recorded as a
    /// duplicate and its labels and definitions are merged into the first.
    pub fn add_class(&mut self, class: OntologyClass) -> &mut Self {
        match self.classes.get_mut(&class.id) {
            Some(existing) => {
                self.duplicates.insert(class.id);
                existing.labels.extend(class.labels);
                existing.canonicalize();
                if existing.definition_text.is_none() {
                    existing.definition_text = class.definition_text;
                }
                if existing.definition_url.is_none() {
                    existing.definition_url = class.definition_url;
                }
            }
            None => {
                let mut class = class;
                class.canonicalize();
                self.classes.insert(class.id, class);
            }
        }
        self
    }

    /// Records that `id` was declared more than once in the source.
    pub fn mark_duplicate(&mut self, id: ClassId) -> &mut Self {
        self.duplicates.insert(id);
        self
    }

    pub fn add_edge(&mut self, edge: Edge) -> &mut Self {
        self.edges.insert(edge);
        self
    }

    pub fn class(mut self, class: OntologyClass) -> Self {
        self.add_class(class);
        self
    }

    pub fn edge(mut self, subject: ClassId, kind: RelationKind, object: ClassId) -> Self {
        self.add_edge(Edge::new(subject, kind, object));
        self
    }

    pub fn build(self) -> Ontology {
        let mut parents: BTreeMap<ClassId, Vec<ClassId>> = BTreeMap::new();
        let mut children: BTreeMap<ClassId, Vec<ClassId>> = BTreeMap::new();
        for e in self.edges.iter().filter(|e| e.kind == RelationKind::Isa) {
            parents.entry(e.subject).or_default().push(e.object);
            children.entry(e.object).or_default().push(e.subject);
        }
        Ontology {
            classes: self.classes,
            duplicates: self.duplicates,
            edges: self.edges,
            roots: self.roots,
            parents,
            children,
            fingerprint: OnceLock::new(),
        }
    }
}

/// Immutable ontology. Classes are keyed by id; edges are a set.
#[derive(Debug, Clone)]
pub struct Ontology {
    classes: BTreeMap<ClassId, OntologyClass>,
    duplicates: BTreeSet<ClassId>,
    edges: BTreeSet<Edge>,
    roots: Roots,
    parents: BTreeMap<ClassId, Vec<ClassId>>,
    children: BTreeMap<ClassId, Vec<ClassId>>,
    fingerprint: OnceLock<String>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes
            && self.duplicates == other.duplicates
            && self.edges == other.edges
            && self.roots == other.roots
    }
}

impl Eq for Ontology {}

impl Default for Ontology {
    fn default() -> Self {
        OntologyBuilder::new().build()
    }
}

impl Ontology {
    pub fn builder() -> OntologyBuilder {
        OntologyBuilder::new()
    }

    /// Reopens the ontology for modification.
    pub fn to_builder(&self) -> OntologyBuilder {
        OntologyBuilder {
            classes: self.classes.clone(),
            duplicates: self.duplicates.clone(),
            edges: self.edges.clone(),
            roots: self.roots,
        }
    }

    pub fn roots(&self) -> Roots {
        self.roots
    }

    pub fn classes(&self) -> impl Iterator<Item = &OntologyClass> {
        self.classes.values()
    }

    pub fn class(&self, id: ClassId) -> Option<&OntologyClass> {
        self.classes.get(&id)
    }

    pub fn contains(&self, id: ClassId) -> bool {
        self.classes.contains_key(&id)
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edges_of_kind(&self, kind: RelationKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    /// Asserted edges touching `id` in either direction.
    pub fn adjacent_edges(&self, id: ClassId) -> (Vec<Edge>, Vec<Edge>) {
        let outgoing = self.edges.iter().filter(|e| e.subject == id).copied().collect();
        let incoming = self.edges.iter().filter(|e| e.object == id).copied().collect();
        (outgoing, incoming)
    }

    pub fn parents(&self, id: ClassId) -> &[ClassId] {
        self.parents.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn children(&self, id: ClassId) -> &[ClassId] {
        self.children.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    fn require(&self, id: ClassId) -> Result<(), OntologyError> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(OntologyError::NotFound(id))
        }
    }

    /// Every class reachable from `id` through one or more ISA edges.
    pub fn ancestors(&self, id: ClassId) -> Result<BTreeSet<ClassId>, OntologyError> {
        self.require(id)?;
        Ok(reach(id, |c| self.parents(c)))
    }

    /// Every class from which `id` is reachable through ISA edges.
    pub fn descendants(&self, id: ClassId) -> Result<BTreeSet<ClassId>, OntologyError> {
        self.require(id)?;
        Ok(reach(id, |c| self.children(c)))
    }

    /// `ancestors` plus `id` itself; unknown ids yield just `{id}`.
    pub fn ancestors_or_self(&self, id: ClassId) -> BTreeSet<ClassId> {
        let mut set = reach(id, |c| self.parents(c));
        set.insert(id);
        set
    }

    pub fn descendants_or_self(&self, id: ClassId) -> BTreeSet<ClassId> {
        let mut set = reach(id, |c| self.children(c));
        set.insert(id);
        set
    }

    /// Which taxonomy a class belongs to. A class under both roots is
    /// classified as `Fields`; strict validation flags it.
    pub fn taxonomy_of(&self, id: ClassId) -> Result<Taxonomy, OntologyError> {
        self.require(id)?;
        let up = self.ancestors_or_self(id);
        Ok(if up.contains(&self.roots.fields) {
            Taxonomy::Fields
        } else if up.contains(&self.roots.objects) {
            Taxonomy::Objects
        } else {
            Taxonomy::Unrooted
        })
    }

    /// Label lookup over normalized text. Results are ordered by the
    /// length of the best matching label, then by id.
    pub fn find_by_label(&self, text: &str, lang: Lang, mode: MatchMode) -> Vec<ClassId> {
        self.find_labels(text, lang, mode).into_iter().map(|(id, _)| id).collect()
    }

    /// Like [`find_by_label`](Self::find_by_label) but also returns the
    /// shortest matching label of each class.
    pub fn find_labels(&self, text: &str, lang: Lang, mode: MatchMode) -> Vec<(ClassId, &Label)> {
        let needle = normalize_label(text);
        let mut found: Vec<(usize, ClassId, &Label)> = Vec::new();
        for class in self.classes.values() {
            let best = class
                .labels_in(lang)
                .filter(|l| {
                    let norm = normalize_label(&l.text);
                    match mode {
                        MatchMode::Exact => norm == needle,
                        MatchMode::Prefix => norm.starts_with(&needle),
                    }
                })
                .min_by_key(|l| (l.text.chars().count(), &l.text));
            if let Some(label) = best {
                found.push((label.text.chars().count(), class.id, label));
            }
        }
        found.sort_by_key(|&(len, id, _)| (len, id));
        found.into_iter().map(|(_, id, l)| (id, l)).collect()
    }

    pub fn stats(&self) -> Stats {
        let mut per_kind = BTreeMap::new();
        for e in &self.edges {
            *per_kind.entry(e.kind).or_insert(0) += 1;
        }
        let isa_edge_count = per_kind.get(&RelationKind::Isa).copied().unwrap_or(0);
        Stats {
            class_count: self.classes.len(),
            isa_edge_count,
            other_edge_count: self.edges.len() - isa_edge_count,
            per_kind,
        }
    }

    /// ISA edges organized into strongly connected components of size > 1.
    pub fn isa_cycles(&self) -> Vec<Vec<ClassId>> {
        let mut graph: DiGraphMap<ClassId, ()> = DiGraphMap::new();
        for e in self.edges_of_kind(RelationKind::Isa) {
            if e.subject != e.object {
                graph.add_edge(e.subject, e.object, ());
            }
        }
        let mut cycles: Vec<Vec<ClassId>> = tarjan_scc(&graph)
            .into_iter()
            .filter(|scc| scc.len() > 1)
            .map(|mut scc| {
                scc.sort();
                scc
            })
            .collect();
        cycles.sort();
        cycles
    }

    pub fn has_isa_cycle(&self) -> bool {
        self.edges_of_kind(RelationKind::Isa).any(|e| e.subject == e.object)
            || !self.isa_cycles().is_empty()
    }

    /// Checks the modeling rules. Returns violations sorted by
    /// `(code, subject, detail)`; an empty list means the ontology is valid.
    pub fn validate(&self, strict: bool) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |code, subject_id, detail: String| {
            out.push(Violation { code, subject_id, detail });
        };

        for id in &self.duplicates {
            push(ViolationCode::DuplicateId, Some(*id), format!("{id} declared more than once"));
        }

        for class in self.classes.values() {
            for lang in Lang::ALL {
                let has = class.labels_in(lang).any(|l| !l.text.trim().is_empty());
                if !has {
                    push(
                        ViolationCode::MissingLabel,
                        Some(class.id),
                        format!("no non-empty {lang} label"),
                    );
                }
            }
            for l in class.labels.iter().filter(|l| l.text.trim().is_empty()) {
                push(ViolationCode::MissingLabel, Some(class.id), format!("blank {} label", l.lang));
            }
            let has_def = class.definition_text.as_deref().is_some_and(|t| !t.trim().is_empty())
                || class.definition_url.as_deref().is_some_and(|u| !u.trim().is_empty());
            if !has_def {
                push(
                    ViolationCode::MissingDefinition,
                    Some(class.id),
                    "neither definition text nor definition link".to_string(),
                );
            }
        }

        for e in &self.edges {
            for endpoint in [e.subject, e.object] {
                if !self.contains(endpoint) {
                    push(
                        ViolationCode::DanglingEndpoint,
                        Some(e.subject),
                        format!("edge {e} refers to undeclared class {endpoint}"),
                    );
                }
            }
            if e.kind == RelationKind::Isa && e.subject == e.object {
                push(ViolationCode::SelfIsa, Some(e.subject), format!("{e}"));
            }
        }

        for cycle in self.isa_cycles() {
            let members: Vec<String> = cycle.iter().map(ToString::to_string).collect();
            push(
                ViolationCode::IsaCycle,
                cycle.first().copied(),
                format!("isa cycle through {}", members.join(", ")),
            );
        }

        if strict {
            self.check_domains(&mut push);
        }

        out.sort();
        out.dedup();
        out
    }

    fn check_domains(&self, push: &mut impl FnMut(ViolationCode, Option<ClassId>, String)) {
        let fields = self.descendants_or_self(self.roots.fields);
        let objects = self.descendants_or_self(self.roots.objects);

        for id in fields.intersection(&objects) {
            if self.contains(*id) {
                push(
                    ViolationCode::BadDomainRange,
                    Some(*id),
                    "class is under both the fields root and the objects root".to_string(),
                );
            }
        }

        for e in &self.edges {
            // (member, field) for P3 and its inverse P4
            let membership = match e.kind {
                RelationKind::BelongsTo => Some((e.subject, e.object)),
                RelationKind::Contains => Some((e.object, e.subject)),
                _ => None,
            };
            if let Some((member, field)) = membership {
                if !fields.contains(&field) {
                    push(
                        ViolationCode::BadDomainRange,
                        Some(e.subject),
                        format!("{e}: {field} is not in the fields taxonomy"),
                    );
                }
                if fields.contains(&member) {
                    push(
                        ViolationCode::BadDomainRange,
                        Some(e.subject),
                        format!("{e}: {member} is itself a field"),
                    );
                }
            }
        }

        let (Some(method_root), Some(problem_root)) = (self.roots.method, self.roots.problem) else {
            return;
        };
        let methods = self.descendants_or_self(method_root);
        let problems = self.descendants_or_self(problem_root);
        for e in &self.edges {
            let pair = match e.kind {
                RelationKind::Solves => Some((e.subject, e.object)),
                RelationKind::SolvedBy => Some((e.object, e.subject)),
                _ => None,
            };
            if let Some((method, problem)) = pair {
                if !methods.contains(&method) {
                    push(
                        ViolationCode::BadDomainRange,
                        Some(e.subject),
                        format!("{e}: {method} is not a method"),
                    );
                }
                if !problems.contains(&problem) {
                    push(
                        ViolationCode::BadDomainRange,
                        Some(e.subject),
                        format!("{e}: {problem} is not a problem"),
                    );
                }
            }
        }
    }

    /// Content hash of the canonical serialization plus the configured roots.
    pub fn fingerprint(&self) -> &str {
        self.fingerprint.get_or_init(|| {
            use sha2::{Digest, Sha256};
            let mut hasher = Sha256::new();
            hasher.update(crate::turtle::serialize_turtle(self));
            hasher.update(format!("{:?}", self.roots).as_bytes());
            hex(&hasher.finalize())
        })
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn reach<'a, F>(start: ClassId, next: F) -> BTreeSet<ClassId>
where
    F: Fn(ClassId) -> &'a [ClassId],
{
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<ClassId> = next(start).iter().copied().collect();
    while let Some(c) = queue.pop_front() {
        if seen.insert(c) {
            queue.extend(next(c).iter().copied());
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: u32) -> ClassId {
        ClassId::new(n)
    }

    fn full_class(n: u32, en: &str, ru: &str) -> OntologyClass {
        OntologyClass::new(id(n))
            .with_label(Label::en(en))
            .with_label(Label::ru(ru))
            .with_definition("def")
    }

    fn five_class_fixture() -> Ontology {
        Ontology::builder()
            .class(full_class(1, "Field of mathematics", "Область математики"))
            .class(full_class(14, "Metric geometry", "Метрическая геометрия"))
            .class(full_class(24, "Mathematical knowledge object", "Объект"))
            .class(full_class(68, "Barycentric coordinates", "Барицентрические координаты"))
            .class(full_class(847, "Set", "Множество"))
            .edge(id(14), RelationKind::Isa, id(1))
            .edge(id(68), RelationKind::Isa, id(24))
            .edge(id(847), RelationKind::Isa, id(24))
            .edge(id(68), RelationKind::BelongsTo, id(14))
            .build()
    }

    #[test]
    fn class_id_parsing() {
        assert_eq!("E1892".parse::<ClassId>().unwrap(), id(1892));
        for bad in ["E0", "E", "e5", "E05", "E-1", "1892", "E12a", "E99999999999"] {
            assert!(bad.parse::<ClassId>().is_err(), "{bad}");
        }
        assert_eq!(id(7).to_string(), "E7");
    }

    #[test]
    fn valid_fixture_has_no_violations() {
        assert_eq!(five_class_fixture().validate(true), vec![]);
    }

    #[test]
    fn missing_english_label() {
        let o = Ontology::builder()
            .class(OntologyClass::new(id(9)).with_label(Label::ru("Тест")).with_definition("d"))
            .build();
        let v = o.validate(false);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::MissingLabel);
        assert_eq!(v[0].subject_id, Some(id(9)));
    }

    #[test]
    fn two_cycle_is_reported() {
        let o = Ontology::builder()
            .class(full_class(2, "a", "а"))
            .class(full_class(3, "b", "б"))
            .edge(id(2), RelationKind::Isa, id(3))
            .edge(id(3), RelationKind::Isa, id(2))
            .build();
        let v = o.validate(false);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::IsaCycle);
        assert!(v[0].detail.contains("E2") && v[0].detail.contains("E3"));
    }

    #[test]
    fn self_isa_dangling_duplicate_and_definition() {
        let mut b = Ontology::builder();
        b.add_class(full_class(5, "x", "х"));
        b.add_class(full_class(5, "y", "у"));
        b.add_class(OntologyClass::new(id(6)).with_label(Label::en("z")).with_label(Label::ru("з")));
        b.add_edge(Edge::isa(id(5), id(5)));
        b.add_edge(Edge::isa(id(6), id(77)));
        let codes: Vec<_> = b.build().validate(false).into_iter().map(|v| v.code).collect();
        assert_eq!(
            codes,
            vec![
                ViolationCode::MissingDefinition,
                ViolationCode::DanglingEndpoint,
                ViolationCode::DuplicateId,
                ViolationCode::SelfIsa,
            ]
        );
    }

    #[test]
    fn strict_domain_checks() {
        let o = five_class_fixture()
            .to_builder()
            .edge(id(847), RelationKind::BelongsTo, id(68))
            .edge(id(14), RelationKind::BelongsTo, id(1))
            .build();
        assert!(o.validate(false).is_empty());
        let strict = o.validate(true);
        assert_eq!(strict.len(), 2);
        assert!(strict.iter().all(|v| v.code == ViolationCode::BadDomainRange));
    }

    #[test]
    fn solves_domain_requires_method_and_problem() {
        let o = Ontology::builder()
            .class(full_class(24, "Object", "Объект"))
            .class(full_class(339, "Problem", "Задача"))
            .class(full_class(449, "Method", "Метод"))
            .class(full_class(660, "Chebyshev iterative method", "Итерационный метод Чебышёва"))
            .class(full_class(444, "Numerical solution of linear equation systems", "Решение СЛАУ"))
            .edge(id(339), RelationKind::Isa, id(24))
            .edge(id(449), RelationKind::Isa, id(24))
            .edge(id(660), RelationKind::Isa, id(449))
            .edge(id(444), RelationKind::Isa, id(339))
            .edge(id(660), RelationKind::Solves, id(444))
            .build();
        assert!(o.validate(true).is_empty());
        let bad = o.to_builder().edge(id(444), RelationKind::Solves, id(660)).build();
        assert_eq!(bad.validate(true).len(), 2);
    }

    #[test]
    fn class_under_both_roots_is_fields_and_flagged() {
        let o = five_class_fixture().to_builder().edge(id(68), RelationKind::Isa, id(14)).build();
        assert_eq!(o.taxonomy_of(id(68)).unwrap(), Taxonomy::Fields);
        assert!(o
            .validate(true)
            .iter()
            .any(|v| v.code == ViolationCode::BadDomainRange && v.subject_id == Some(id(68))));
    }

    #[test]
    fn ancestors_with_multiple_parents() {
        let o = Ontology::builder()
            .class(full_class(1892, "Differential equation", "Дифференциальное уравнение"))
            .class(full_class(1891, "Equation", "Уравнение"))
            .class(full_class(2688, "Element of differential equations", "Элемент ДУ"))
            .edge(id(1892), RelationKind::Isa, id(1891))
            .edge(id(1892), RelationKind::Isa, id(2688))
            .build();
        assert_eq!(o.ancestors(id(1892)).unwrap(), BTreeSet::from([id(1891), id(2688)]));
        assert!(o.ancestors(id(1891)).unwrap().is_empty());
        assert_eq!(o.ancestors(id(5)), Err(OntologyError::NotFound(id(5))));
    }

    #[test]
    fn chain_and_diamond_reachability() {
        let (a, b, c, d) = (id(1), id(2), id(3), id(4));
        let chain = Ontology::builder()
            .class(OntologyClass::new(a))
            .class(OntologyClass::new(b))
            .class(OntologyClass::new(c))
            .edge(a, RelationKind::Isa, b)
            .edge(b, RelationKind::Isa, c)
            .build();
        assert_eq!(chain.ancestors(a).unwrap(), BTreeSet::from([b, c]));
        assert_eq!(chain.descendants(c).unwrap(), BTreeSet::from([a, b]));
        assert!(chain.descendants(a).unwrap().is_empty());

        let diamond = chain
            .to_builder()
            .class(OntologyClass::new(d))
            .edge(a, RelationKind::Isa, c)
            .edge(b, RelationKind::Isa, d)
            .edge(c, RelationKind::Isa, d)
            .build();
        assert_eq!(diamond.descendants(d).unwrap(), BTreeSet::from([a, b, c]));
    }

    #[test]
    fn taxonomy_classification() {
        let o = five_class_fixture()
            .to_builder()
            .class(full_class(99, "Loner", "Одиночка"))
            .build();
        assert_eq!(o.taxonomy_of(id(14)).unwrap(), Taxonomy::Fields);
        assert_eq!(o.taxonomy_of(id(1)).unwrap(), Taxonomy::Fields);
        assert_eq!(o.taxonomy_of(id(847)).unwrap(), Taxonomy::Objects);
        assert_eq!(o.taxonomy_of(id(99)).unwrap(), Taxonomy::Unrooted);
    }

    #[test]
    fn label_lookup() {
        let o = Ontology::builder()
            .class(
                OntologyClass::new(id(1226))
                    .with_label(Label::en("Cauchy's inequality"))
                    .with_label(Label::en("Inequality of arithmetic and geometric means"))
                    .with_label(Label::ru("Неравенство Коши")),
            )
            .class(OntologyClass::new(id(660)).with_label(Label::en("Chebyshev Iterative Method")))
            .class(OntologyClass::new(id(661)).with_label(Label::en("Chebyshev polynomial")))
            .build();
        assert_eq!(
            o.find_by_label("Inequality of arithmetic and geometric means", Lang::En, MatchMode::Exact),
            vec![id(1226)]
        );
        assert_eq!(
            o.find_by_label("  inequality OF arithmetic   and geometric means", Lang::En, MatchMode::Exact),
            vec![id(1226)]
        );
        assert!(o.find_by_label("zzzz-no-such-term", Lang::En, MatchMode::Exact).is_empty());
        assert_eq!(
            o.find_by_label("Cheb", Lang::En, MatchMode::Prefix),
            vec![id(661), id(660)]
        );
        assert_eq!(o.find_by_label("неравенство", Lang::Ru, MatchMode::Prefix), vec![id(1226)]);
        assert!(o.find_by_label("неравенство", Lang::En, MatchMode::Prefix).is_empty());
    }

    #[test]
    fn stats_counts() {
        assert_eq!(Ontology::default().stats(), Stats::default());
        let s = five_class_fixture().stats();
        assert_eq!(s.class_count, 5);
        assert_eq!(s.isa_edge_count, 3);
        assert_eq!(s.other_edge_count, 1);
        assert_eq!(s.per_kind[&RelationKind::BelongsTo], 1);
    }

    #[test]
    fn inverse_pairs() {
        use RelationKind::*;
        assert_eq!(Isa.inverse(), None);
        assert_eq!(SeeAlso.inverse(), Some(SeeAlso));
        for k in RelationKind::ALL.into_iter().filter(|k| *k != Isa) {
            assert_eq!(k.inverse().and_then(RelationKind::inverse), Some(k));
        }
        assert_eq!(Defines.inverse(), Some(DefinedBy));
        assert_eq!(BelongsTo.inverse(), Some(Contains));
        assert_eq!(Solves.inverse(), Some(SolvedBy));
    }
}
