//! Rule-based materialization of inferable edges.
//!
//! | Rule                   | Premises                               | Conclusion  |
//! |------------------------|----------------------------------------|-------------|
//! | `ISA_TRANSITIVITY`     | `a isa b`, `b isa c`                   | `a isa c`   |
//! | `INVERSE_COMPLETION`   | `x P1 y` / `x P3 y` / `x P6 y` (and back) | `y P2 x` / `y P4 x` / `y P7 x` |
//! | `SEEALSO_SYMMETRY`     | `x P5 y`                               | `y P5 x`    |
//! | `SEEALSO_TRANSITIVITY` | `x P5 y`, `y P5 z`, `x != z`           | `x P5 z`    |
//! | `SOLVES_INHERITANCE`   | `m P6 t`, `m' isa* m`, `t' isa* t`     | `m' P6 t'`  |
//! | `BELONGSTO_DOWN`       | `x isa y`, `y P3 f`                    | `x P3 f`    |
//! | `BELONGSTO_FIELD_UP`   | `x P3 f`, `f isa g`                    | `x P3 g`    |
//!
//! `isa*` is reflexive-transitive. The direction flags in [`ReasonerConfig`]
//! flip which side of `isa*` each argument of `P6` moves along.
//!
//! The rules only interact through the ISA hierarchy, so the fixpoint is
//! computed per relation family rather than by iterating all rules.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{ClassId, Edge, Ontology, RelationKind};
use crate::turtle::TurtleWriter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    IsaTransitivity,
    InverseCompletion,
    SeealsoSymmetry,
    SeealsoTransitivity,
    SolvesInheritance,
    BelongstoDown,
    BelongstoFieldUp,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::IsaTransitivity,
        Rule::InverseCompletion,
        Rule::SeealsoSymmetry,
        Rule::SeealsoTransitivity,
        Rule::SolvesInheritance,
        Rule::BelongstoDown,
        Rule::BelongstoFieldUp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::IsaTransitivity => "ISA_TRANSITIVITY",
            Rule::InverseCompletion => "INVERSE_COMPLETION",
            Rule::SeealsoSymmetry => "SEEALSO_SYMMETRY",
            Rule::SeealsoTransitivity => "SEEALSO_TRANSITIVITY",
            Rule::SolvesInheritance => "SOLVES_INHERITANCE",
            Rule::BelongstoDown => "BELONGSTO_DOWN",
            Rule::BelongstoFieldUp => "BELONGSTO_FIELD_UP",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == wanted)
            .ok_or_else(|| format!("unknown rule {s:?}"))
    }
}

/// Which way an argument of `P6` is propagated along the ISA hierarchy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Sub-classes inherit the relation.
    #[default]
    Down,
    /// Super-classes inherit the relation.
    Up,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "down" => Ok(Direction::Down),
            "up" => Ok(Direction::Up),
            other => Err(format!("unknown direction {other:?}, expected down or up")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReasonerConfig {
    pub enabled_rules: BTreeSet<Rule>,
    pub solves_method_direction: Direction,
    pub solves_problem_direction: Direction,
}

impl Default for ReasonerConfig {
    fn default() -> Self {
        ReasonerConfig {
            enabled_rules: Rule::ALL.into_iter().collect(),
            solves_method_direction: Direction::Down,
            solves_problem_direction: Direction::Down,
        }
    }
}

impl ReasonerConfig {
    pub fn with_rules(rules: impl IntoIterator<Item = Rule>) -> Self {
        ReasonerConfig { enabled_rules: rules.into_iter().collect(), ..Default::default() }
    }

    pub fn enabled(&self, rule: Rule) -> bool {
        self.enabled_rules.contains(&rule)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", content = "rules")]
pub enum Provenance {
    Asserted,
    /// Rules with a one-step derivation of the edge from the closed graph.
    Inferred(BTreeSet<Rule>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error("isa graph is cyclic through {}", fmt_ids(.0))]
    IsaCycle(Vec<ClassId>),
}

fn fmt_ids(ids: &[ClassId]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Asserted plus inferred edges, closed under the enabled rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MaterializedGraph {
    provenance: BTreeMap<Edge, Provenance>,
}

impl MaterializedGraph {
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.provenance.keys()
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.provenance.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn provenance(&self, edge: &Edge) -> Option<&Provenance> {
        self.provenance.get(edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &Provenance)> {
        self.provenance.iter()
    }

    pub fn entails(&self, edge: &Edge) -> bool {
        self.provenance.contains_key(edge)
    }

    pub fn inferred_only(&self) -> BTreeSet<Edge> {
        self.provenance
            .iter()
            .filter(|(_, p)| !matches!(p, Provenance::Asserted))
            .map(|(e, _)| *e)
            .collect()
    }
}

/// Walks the asserted ISA hierarchy with memoized reflexive reachability.
struct Hierarchy {
    up: HashMap<ClassId, Vec<ClassId>>,
    down: HashMap<ClassId, Vec<ClassId>>,
    up_cache: HashMap<ClassId, BTreeSet<ClassId>>,
    down_cache: HashMap<ClassId, BTreeSet<ClassId>>,
}

impl Hierarchy {
    fn new<'a>(isa: impl Iterator<Item = &'a Edge>) -> Self {
        let mut up: HashMap<ClassId, Vec<ClassId>> = HashMap::new();
        let mut down: HashMap<ClassId, Vec<ClassId>> = HashMap::new();
        for e in isa {
            up.entry(e.subject).or_default().push(e.object);
            down.entry(e.object).or_default().push(e.subject);
        }
        Hierarchy { up, down, up_cache: HashMap::new(), down_cache: HashMap::new() }
    }

    fn star(adj: &HashMap<ClassId, Vec<ClassId>>, start: ClassId) -> BTreeSet<ClassId> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            for &n in adj.get(&c).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen
    }

    fn up_star(&mut self, c: ClassId) -> &BTreeSet<ClassId> {
        let up = &self.up;
        self.up_cache.entry(c).or_insert_with(|| Self::star(up, c))
    }

    fn down_star(&mut self, c: ClassId) -> &BTreeSet<ClassId> {
        let down = &self.down;
        self.down_cache.entry(c).or_insert_with(|| Self::star(down, c))
    }

    fn along(&mut self, c: ClassId, dir: Direction) -> BTreeSet<ClassId> {
        match dir {
            Direction::Down => self.down_star(c).clone(),
            Direction::Up => self.up_star(c).clone(),
        }
    }

    /// Classes a conclusion argument may have been inherited from.
    fn sources(&mut self, c: ClassId, dir: Direction) -> BTreeSet<ClassId> {
        match dir {
            Direction::Down => self.up_star(c).clone(),
            Direction::Up => self.down_star(c).clone(),
        }
    }
}

/// Computes the closure of the asserted edges under the enabled rules.
pub fn materialize(ontology: &Ontology, config: &ReasonerConfig) -> Result<MaterializedGraph, ReasonerError> {
    materialize_edges(ontology.edges(), config)
}

/// Same as [`materialize`] over a bare edge set.
pub fn materialize_edges(asserted: &BTreeSet<Edge>, config: &ReasonerConfig) -> Result<MaterializedGraph, ReasonerError> {
    use RelationKind::*;

    if let Some(cycle) = find_isa_cycle(asserted) {
        return Err(ReasonerError::IsaCycle(cycle));
    }
    let on = |r| config.enabled(r);
    let mut h = Hierarchy::new(asserted.iter().filter(|e| e.kind == Isa));
    let of = |kind| asserted.iter().filter(move |e: &&Edge| e.kind == kind);
    let mut out: BTreeSet<Edge> = asserted.clone();

    if on(Rule::IsaTransitivity) {
        let subjects: BTreeSet<ClassId> = of(Isa).map(|e| e.subject).collect();
        for s in subjects {
            for &a in h.up_star(s) {
                if a != s {
                    out.insert(Edge::isa(s, a));
                }
            }
        }
    }

    if on(Rule::InverseCompletion) {
        for e in of(Defines).chain(of(DefinedBy)) {
            out.insert(e.inverse().expect("P1/P2 have inverses"));
        }
    }

    // belongs-to / contains
    let mut belongs: BTreeSet<(ClassId, ClassId)> = of(BelongsTo).map(|e| (e.subject, e.object)).collect();
    if on(Rule::InverseCompletion) {
        belongs.extend(of(Contains).map(|e| (e.object, e.subject)));
    }
    let mut belongs_closed = BTreeSet::new();
    for (y, f) in belongs {
        let members = if on(Rule::BelongstoDown) { h.down_star(y).clone() } else { BTreeSet::from([y]) };
        let fields = if on(Rule::BelongstoFieldUp) { h.up_star(f).clone() } else { BTreeSet::from([f]) };
        for &x in &members {
            for &g in &fields {
                belongs_closed.insert((x, g));
            }
        }
    }
    for &(x, g) in &belongs_closed {
        out.insert(Edge::new(x, BelongsTo, g));
        if on(Rule::InverseCompletion) {
            out.insert(Edge::new(g, Contains, x));
        }
    }

    // solves / solved-by
    let mut solves: BTreeSet<(ClassId, ClassId)> = of(Solves).map(|e| (e.subject, e.object)).collect();
    if on(Rule::InverseCompletion) {
        solves.extend(of(SolvedBy).map(|e| (e.object, e.subject)));
    }
    let mut solves_closed = BTreeSet::new();
    for (m, t) in solves {
        if on(Rule::SolvesInheritance) {
            let methods = h.along(m, config.solves_method_direction);
            let problems = h.along(t, config.solves_problem_direction);
            for &m2 in &methods {
                for &t2 in &problems {
                    solves_closed.insert((m2, t2));
                }
            }
        } else {
            solves_closed.insert((m, t));
        }
    }
    for &(m, t) in &solves_closed {
        out.insert(Edge::new(m, Solves, t));
        if on(Rule::InverseCompletion) {
            out.insert(Edge::new(t, SolvedBy, m));
        }
    }

    // see-also
    let mut see_also: HashMap<ClassId, BTreeSet<ClassId>> = HashMap::new();
    for e in of(SeeAlso) {
        see_also.entry(e.subject).or_default().insert(e.object);
        if on(Rule::SeealsoSymmetry) && e.subject != e.object {
            see_also.entry(e.object).or_default().insert(e.subject);
            out.insert(Edge::new(e.object, SeeAlso, e.subject));
        }
    }
    if on(Rule::SeealsoTransitivity) {
        let starts: Vec<ClassId> = see_also.keys().copied().collect();
        for x in starts {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<ClassId> = see_also[&x].iter().copied().collect();
            while let Some(y) = stack.pop() {
                if seen.insert(y) {
                    if let Some(next) = see_also.get(&y) {
                        stack.extend(next.iter().copied());
                    }
                }
            }
            for z in seen.into_iter().filter(|&z| z != x) {
                out.insert(Edge::new(x, SeeAlso, z));
            }
        }
    }

    let provenance = attribute(asserted, out, config, &mut h);
    Ok(MaterializedGraph { provenance })
}

fn find_isa_cycle(edges: &BTreeSet<Edge>) -> Option<Vec<ClassId>> {
    use petgraph::algo::tarjan_scc;
    use petgraph::graphmap::DiGraphMap;

    let mut graph: DiGraphMap<ClassId, ()> = DiGraphMap::new();
    for e in edges.iter().filter(|e| e.kind == RelationKind::Isa) {
        if e.subject == e.object {
            return Some(vec![e.subject]);
        }
        graph.add_edge(e.subject, e.object, ());
    }
    tarjan_scc(&graph).into_iter().find(|scc| scc.len() > 1).map(|mut scc| {
        scc.sort();
        scc
    })
}

/// Assigns provenance: asserted edges keep `Asserted`; every other edge
/// gets the set of enabled rules that derive it in one step from premises
/// other than itself.
fn attribute(
    asserted: &BTreeSet<Edge>,
    closed: BTreeSet<Edge>,
    config: &ReasonerConfig,
    h: &mut Hierarchy,
) -> BTreeMap<Edge, Provenance> {
    use RelationKind::*;

    let set: HashSet<Edge> = closed.iter().copied().collect();
    let mut out_index: HashMap<(RelationKind, ClassId), Vec<ClassId>> = HashMap::new();
    for e in &closed {
        out_index.entry((e.kind, e.subject)).or_default().push(e.object);
    }
    let outs = |kind, c| out_index.get(&(kind, c)).map(Vec::as_slice).unwrap_or(&[]);
    let has = |s, k, o| set.contains(&Edge::new(s, k, o));

    let mut result = BTreeMap::new();
    for e in closed.iter().copied() {
        if asserted.contains(&e) {
            result.insert(e, Provenance::Asserted);
            continue;
        }
        let (x, z) = (e.subject, e.object);
        let mut rules = BTreeSet::new();
        for rule in config.enabled_rules.iter().copied() {
            let fires = match (rule, e.kind) {
                (Rule::IsaTransitivity, Isa) => {
                    outs(Isa, x).iter().any(|&b| b != x && b != z && has(b, Isa, z))
                }
                (Rule::InverseCompletion, Defines | DefinedBy | BelongsTo | Contains | Solves | SolvedBy) => {
                    e.inverse().is_some_and(|inv| set.contains(&inv))
                }
                (Rule::SeealsoSymmetry, SeeAlso) => x != z && has(z, SeeAlso, x),
                (Rule::SeealsoTransitivity, SeeAlso) => {
                    x != z && outs(SeeAlso, x).iter().any(|&y| y != x && y != z && has(y, SeeAlso, z))
                }
                (Rule::SolvesInheritance, Solves) => {
                    let methods = h.sources(x, config.solves_method_direction);
                    let problems = h.sources(z, config.solves_problem_direction);
                    methods.iter().any(|&m| {
                        problems.iter().any(|&t| (m, t) != (x, z) && has(m, Solves, t))
                    })
                }
                (Rule::BelongstoDown, BelongsTo) => {
                    outs(Isa, x).iter().any(|&y| y != x && has(y, BelongsTo, z))
                }
                (Rule::BelongstoFieldUp, BelongsTo) => {
                    outs(BelongsTo, x).iter().any(|&f| f != z && has(f, Isa, z))
                }
                _ => false,
            };
            if fires {
                rules.insert(rule);
            }
        }
        result.insert(e, Provenance::Inferred(rules));
    }
    result
}

/// The ontology's classes followed by every edge of `graph`; inferred edges
/// carry a trailing `# inferred: RULE[,RULE...]` comment.
pub fn serialize_materialized(ontology: &Ontology, graph: &MaterializedGraph) -> String {
    let writer = TurtleWriter::default();
    let mut out = String::new();
    writer.prefixes(&mut out);
    for class in ontology.classes() {
        out.push('\n');
        writer.class_block(class, &mut out);
    }
    if !graph.is_empty() {
        out.push('\n');
    }
    for (e, p) in graph.iter() {
        writer.edge_triple(e, &mut out);
        if let Provenance::Inferred(rules) = p {
            let names: Vec<&str> = rules.iter().map(|r| r.name()).collect();
            out.push_str(" # inferred: ");
            out.push_str(&names.join(","));
        }
        out.push('\n');
    }
    out
}
