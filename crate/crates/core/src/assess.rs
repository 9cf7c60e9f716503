//! Competence assessment: participants link a list of classes with `isa` and
//! `solves`, and are scored against a gold fragment of the ontology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{ClassId, Edge, Ontology, RelationKind};
use crate::reasoner::{materialize_edges, ReasonerConfig, Rule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub ontology: Ontology,
    pub task_root: ClassId,
    pub method_root: ClassId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("class {0} not found")]
    NotFound(ClassId),
    #[error("root {0} is not in the seed set")]
    RootNotSeeded(ClassId),
    #[error("class {0} is not below either root")]
    Unreachable(ClassId),
    #[error("class {0} is below both roots")]
    Ambiguous(ClassId),
    #[error("fragment isa graph is cyclic through {0}")]
    Cyclic(ClassId),
}

/// Induced `isa`/`P6` subgraph on `seeds`. `P7` edges are turned around.
pub fn extract_fragment(
    ontology: &Ontology,
    seeds: &BTreeSet<ClassId>,
    task_root: ClassId,
    method_root: ClassId,
) -> Result<Fragment, FragmentError> {
    if let Some(&missing) = seeds.iter().find(|&&id| !ontology.contains(id)) {
        return Err(FragmentError::NotFound(missing));
    }
    for root in [task_root, method_root] {
        if !seeds.contains(&root) {
            return Err(FragmentError::RootNotSeeded(root));
        }
    }
    let mut builder = Ontology::builder();
    for &id in seeds {
        let class = ontology.class(id).expect("checked above");
        builder.add_class(class.clone());
    }
    for edge in ontology.edges() {
        if !seeds.contains(&edge.subject) || !seeds.contains(&edge.object) {
            continue;
        }
        match edge.kind {
            RelationKind::Isa | RelationKind::Solves => {
                builder.add_edge(*edge);
            }
            RelationKind::SolvedBy => {
                builder.add_edge(edge.inverse().expect("P7 has an inverse"));
            }
            _ => {}
        }
    }
    let fragment = Fragment { ontology: builder.build(), task_root, method_root };
    if let Some(cycle) = fragment.ontology.isa_cycles().first() {
        return Err(FragmentError::Cyclic(cycle[0]));
    }
    if let Some(self_loop) = fragment.ontology.edges_of_kind(RelationKind::Isa).find(|e| e.subject == e.object) {
        return Err(FragmentError::Cyclic(self_loop.subject));
    }
    for &id in seeds {
        match (fragment.in_tree(id, task_root), fragment.in_tree(id, method_root)) {
            (false, false) => return Err(FragmentError::Unreachable(id)),
            (true, true) => return Err(FragmentError::Ambiguous(id)),
            _ => {}
        }
    }
    Ok(fragment)
}

impl Fragment {
    fn in_tree(&self, id: ClassId, root: ClassId) -> bool {
        self.ontology.ancestors_or_self(id).contains(&root)
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.ontology.classes().map(|c| c.id)
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        self.ontology.edges()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeCategory {
    IsaTasks,
    IsaMethods,
    Solves,
}

impl EdgeCategory {
    pub const ALL: [EdgeCategory; 3] = [EdgeCategory::IsaTasks, EdgeCategory::IsaMethods, EdgeCategory::Solves];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdgeError {
    #[error("{0} is not a fragment class")]
    UnknownClass(ClassId),
    #[error("only isa and P6 edges can be scored, got {0}")]
    UnsupportedKind(RelationKind),
    #[error("isa edge {0} {1} crosses the task and method trees")]
    CrossesTrees(ClassId, ClassId),
    #[error("isa edge from {0} to itself")]
    SelfIsa(ClassId),
}

pub fn categorize_edge(fragment: &Fragment, edge: &Edge) -> Result<EdgeCategory, EdgeError> {
    for id in [edge.subject, edge.object] {
        if !fragment.ontology.contains(id) {
            return Err(EdgeError::UnknownClass(id));
        }
    }
    match edge.kind {
        RelationKind::Solves => Ok(EdgeCategory::Solves),
        RelationKind::Isa if edge.subject == edge.object => Err(EdgeError::SelfIsa(edge.subject)),
        RelationKind::Isa => {
            let tasks = |id| fragment.in_tree(id, fragment.task_root);
            let methods = |id| fragment.in_tree(id, fragment.method_root);
            if tasks(edge.subject) && tasks(edge.object) {
                Ok(EdgeCategory::IsaTasks)
            } else if methods(edge.subject) && methods(edge.object) {
                Ok(EdgeCategory::IsaMethods)
            } else {
                Err(EdgeError::CrossesTrees(edge.subject, edge.object))
            }
        }
        other => Err(EdgeError::UnsupportedKind(other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Undergrad3,
    Master1,
    Master2,
    Phd,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::Undergrad3, Group::Master1, Group::Master2, Group::Phd];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Undergrad3 => "undergrad3",
            Group::Master1 => "master1",
            Group::Master2 => "master2",
            Group::Phd => "phd",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown group {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubmissionKind {
    Isa,
    Solves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubmissionEdge {
    pub subject: ClassId,
    pub kind: SubmissionKind,
    pub object: ClassId,
}

impl From<SubmissionEdge> for Edge {
    fn from(e: SubmissionEdge) -> Edge {
        let kind = match e.kind {
            SubmissionKind::Isa => RelationKind::Isa,
            SubmissionKind::Solves => RelationKind::Solves,
        };
        Edge::new(e.subject, kind, e.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Submission {
    pub participant_id: String,
    pub group: Group,
    pub edges: Vec<SubmissionEdge>,
}

impl Submission {
    pub fn from_json(input: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(input)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    #[serde(rename = "fScore")]
    pub f_score: f64,
}

impl Scores {
    pub const ZERO: Scores = Scores { precision: 0.0, recall: 0.0, f_score: 0.0 };

    /// Scores of `submitted` against `gold`, with P = 0 for an empty
    /// submission and R = 0 for an empty gold set.
    pub fn of(submitted: &BTreeSet<Edge>, gold: &BTreeSet<Edge>) -> Scores {
        let hits = submitted.intersection(gold).count() as f64;
        let ratio = |n: usize| if n == 0 { 0.0 } else { hits / n as f64 };
        let precision = ratio(submitted.len());
        let recall = ratio(gold.len());
        Scores { precision, recall, f_score: f_score(precision, recall) }
    }

    pub fn rounded(self) -> Scores {
        Scores { precision: round2(self.precision), recall: round2(self.recall), f_score: round2(self.f_score) }
    }
}

/// Harmonic mean of precision and recall, 0 when both are 0.
///
/// Panics when an argument lies outside `[0, 1]`.
pub fn f_score(p: f64, r: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "precision {p} outside [0, 1]");
    assert!((0.0..=1.0).contains(&r), "recall {r} outside [0, 1]");
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Rounds half-up to two decimals. The small bias absorbs binary
/// representation error so that e.g. 0.585 rounds to 0.59.
pub fn round2(x: f64) -> f64 {
    ((x * 100.0) + 0.5 + 1e-9).floor() / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoreConfig {
    pub materialize_submission: bool,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig { materialize_submission: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AssessmentReport {
    pub participant_id: String,
    pub group: Group,
    pub per_category: BTreeMap<EdgeCategory, Scores>,
    pub total: Scores,
    pub excluded_edge_count: usize,
}

fn closure_config() -> ReasonerConfig {
    ReasonerConfig::with_rules([Rule::IsaTransitivity, Rule::SolvesInheritance])
}

fn close(edges: &BTreeSet<Edge>) -> BTreeSet<Edge> {
    materialize_edges(edges, &closure_config())
        .expect("scored edge sets are acyclic")
        .edges()
        .filter(|e| matches!(e.kind, RelationKind::Isa | RelationKind::Solves))
        .copied()
        .collect()
}

fn by_category(fragment: &Fragment, edges: &BTreeSet<Edge>) -> BTreeMap<EdgeCategory, BTreeSet<Edge>> {
    let mut out: BTreeMap<EdgeCategory, BTreeSet<Edge>> = EdgeCategory::ALL.into_iter().map(|c| (c, BTreeSet::new())).collect();
    for e in edges {
        let category = categorize_edge(fragment, e).expect("closure of valid edges stays categorizable");
        out.get_mut(&category).unwrap().insert(*e);
    }
    out
}

/// Gold edge set: the fragment closed under isa transitivity and solves
/// inheritance.
pub fn gold_edges(fragment: &Fragment) -> BTreeSet<Edge> {
    close(fragment.edges())
}

/// Valid submission edges and the number excluded. Edges with unknown
/// endpoints, self-isa, isa edges across the two trees and isa edges on a
/// cycle are excluded.
pub fn admissible_edges(fragment: &Fragment, submission: &Submission) -> (BTreeSet<Edge>, usize) {
    let raw: BTreeSet<Edge> = submission.edges.iter().map(|&e| e.into()).collect();
    let mut kept: BTreeSet<Edge> = raw.iter().filter(|e| categorize_edge(fragment, e).is_ok()).copied().collect();

    let mut isa_only = Ontology::builder();
    for e in kept.iter().filter(|e| e.kind == RelationKind::Isa) {
        isa_only.add_edge(*e);
    }
    let on_cycle: BTreeSet<ClassId> = isa_only.build().isa_cycles().into_iter().flatten().collect();
    kept.retain(|e| !(e.kind == RelationKind::Isa && on_cycle.contains(&e.subject) && on_cycle.contains(&e.object)));
    let excluded = raw.len() - kept.len();
    (kept, excluded)
}

pub fn score(fragment: &Fragment, submission: &Submission, config: &ScoreConfig) -> AssessmentReport {
    let gold = gold_edges(fragment);
    let (admissible, excluded_edge_count) = admissible_edges(fragment, submission);
    let submitted = if config.materialize_submission { close(&admissible) } else { admissible };

    let gold_by = by_category(fragment, &gold);
    let sub_by = by_category(fragment, &submitted);
    let per_category = EdgeCategory::ALL
        .into_iter()
        .map(|c| (c, Scores::of(&sub_by[&c], &gold_by[&c])))
        .collect();
    AssessmentReport {
        participant_id: submission.participant_id.clone(),
        group: submission.group,
        per_category,
        total: Scores::of(&submitted, &gold),
        excluded_edge_count,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupSummary {
    pub group: Group,
    pub participants: usize,
    pub per_category: BTreeMap<EdgeCategory, Scores>,
    pub total: Scores,
}

fn mean(scores: &[Scores]) -> Scores {
    let n = scores.len() as f64;
    let avg = |f: fn(&Scores) -> f64| scores.iter().map(f).sum::<f64>() / n;
    Scores {
        precision: round2(avg(|s| s.precision)),
        recall: round2(avg(|s| s.recall)),
        f_score: round2(avg(|s| s.f_score)),
    }
}

/// Per-group cell means, each rounded to two decimals.
pub fn aggregate(reports: &[AssessmentReport]) -> Vec<GroupSummary> {
    Group::ALL
        .into_iter()
        .filter_map(|group| {
            let members: Vec<&AssessmentReport> = reports.iter().filter(|r| r.group == group).collect();
            if members.is_empty() {
                return None;
            }
            let per_category = EdgeCategory::ALL
                .into_iter()
                .map(|c| {
                    let cells: Vec<Scores> = members.iter().map(|r| r.per_category[&c]).collect();
                    (c, mean(&cells))
                })
                .collect();
            let totals: Vec<Scores> = members.iter().map(|r| r.total).collect();
            Some(GroupSummary { group, participants: members.len(), per_category, total: mean(&totals) })
        })
        .collect()
}

/// Text table with one row per group and P/R/F triples per column.
pub fn render_table(summaries: &[GroupSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12}{:<16}{:<16}{:<16}{}", "group", "ISA tasks", "ISA methods", "P6 solves", "total");
    let _ = writeln!(out, "{:<12}{}", "", "P    R    F     ".repeat(4).trim_end());
    for s in summaries {
        let _ = write!(out, "{:<12}", s.group.as_str());
        let cells: Vec<Scores> = EdgeCategory::ALL.iter().map(|c| s.per_category[c]).chain([s.total]).collect();
        let row: Vec<String> = cells
            .iter()
            .map(|c| format!("{:.2} {:.2} {:.2}", c.precision, c.recall, c.f_score))
            .collect();
        let _ = writeln!(out, "{}", row.join("  "));
    }
    out
}
