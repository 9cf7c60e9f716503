use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ontohub_core::dataset::ExternalDataset;
use ontohub_core::mathsearch::{Corpus, SearchHit, SearchQuery};
use ontohub_core::reasoner::{Direction, ReasonerConfig, Rule};
use ontohub_core::{ClassId, Edge, Ontology, RelationKind};

use RelationKind::*;

fn pairs(edges: &BTreeSet<Edge>, kind: RelationKind) -> Vec<(ClassId, ClassId)> {
    edges.iter().filter(|e| e.kind == kind).map(|e| (e.subject, e.object)).collect()
}

/// Reflexive-transitive isa reachability by repeated relaxation over the
/// current edge set.
fn isa_star(edges: &BTreeSet<Edge>) -> BTreeSet<(ClassId, ClassId)> {
    let isa = pairs(edges, Isa);
    let mut reach: BTreeSet<(ClassId, ClassId)> = isa.iter().copied().collect();
    for &(a, b) in &isa {
        reach.insert((a, a));
        reach.insert((b, b));
    }
    loop {
        let mut added = Vec::new();
        for &(a, b) in &reach {
            for &(c, d) in &isa {
                if b == c && !reach.contains(&(a, d)) {
                    added.push((a, d));
                }
            }
        }
        if added.is_empty() {
            return reach;
        }
        reach.extend(added);
    }
}

fn below(star: &BTreeSet<(ClassId, ClassId)>, x: ClassId, y: ClassId) -> bool {
    x == y || star.contains(&(x, y))
}

/// Applies every enabled rule once to `edges`, returning the conclusions.
fn one_step(edges: &BTreeSet<Edge>, config: &ReasonerConfig) -> BTreeSet<Edge> {
    let on = |r| config.enabled(r);
    let mut out = BTreeSet::new();
    let nodes: BTreeSet<ClassId> = edges.iter().flat_map(|e| [e.subject, e.object]).collect();

    if on(Rule::IsaTransitivity) {
        for (a, b) in pairs(edges, Isa) {
            for (c, d) in pairs(edges, Isa) {
                if b == c {
                    out.insert(Edge::new(a, Isa, d));
                }
            }
        }
    }
    if on(Rule::InverseCompletion) {
        let swap = [(Defines, DefinedBy), (DefinedBy, Defines), (BelongsTo, Contains), (Contains, BelongsTo), (Solves, SolvedBy), (SolvedBy, Solves)];
        for (from, to) in swap {
            for (x, y) in pairs(edges, from) {
                out.insert(Edge::new(y, to, x));
            }
        }
    }
    if on(Rule::SeealsoSymmetry) {
        for (x, y) in pairs(edges, SeeAlso) {
            out.insert(Edge::new(y, SeeAlso, x));
        }
    }
    if on(Rule::SeealsoTransitivity) {
        for (x, y) in pairs(edges, SeeAlso) {
            for (y2, z) in pairs(edges, SeeAlso) {
                if y == y2 && x != z {
                    out.insert(Edge::new(x, SeeAlso, z));
                }
            }
        }
    }
    if on(Rule::SolvesInheritance) {
        let star = isa_star(edges);
        for (m, t) in pairs(edges, Solves) {
            for &m2 in &nodes {
                let m_ok = match config.solves_method_direction {
                    Direction::Down => below(&star, m2, m),
                    Direction::Up => below(&star, m, m2),
                };
                if !m_ok {
                    continue;
                }
                for &t2 in &nodes {
                    let t_ok = match config.solves_problem_direction {
                        Direction::Down => below(&star, t2, t),
                        Direction::Up => below(&star, t, t2),
                    };
                    if t_ok {
                        out.insert(Edge::new(m2, Solves, t2));
                    }
                }
            }
        }
    }
    if on(Rule::BelongstoDown) {
        for (x, y) in pairs(edges, Isa) {
            for (y2, f) in pairs(edges, BelongsTo) {
                if y == y2 {
                    out.insert(Edge::new(x, BelongsTo, f));
                }
            }
        }
    }
    if on(Rule::BelongstoFieldUp) {
        for (x, f) in pairs(edges, BelongsTo) {
            for (f2, g) in pairs(edges, Isa) {
                if f == f2 {
                    out.insert(Edge::new(x, BelongsTo, g));
                }
            }
        }
    }
    out
}

/// Apply-rules-until-no-change closure.
pub fn naive_closure(asserted: &BTreeSet<Edge>, config: &ReasonerConfig) -> BTreeSet<Edge> {
    let mut edges = asserted.clone();
    loop {
        let before = edges.len();
        let step = one_step(&edges, config);
        edges.extend(step);
        if edges.len() == before {
            return edges;
        }
    }
}

/// Strict isa reachability by Floyd-Warshall over a dense matrix.
pub fn floyd_isa(ontology: &Ontology) -> BTreeSet<(ClassId, ClassId)> {
    let ids: Vec<ClassId> = ontology.classes().map(|c| c.id).collect();
    let pos: BTreeMap<ClassId, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let n = ids.len();
    let mut m = vec![vec![false; n]; n];
    for e in ontology.edges().iter().filter(|e| e.kind == Isa) {
        if let (Some(&a), Some(&b)) = (pos.get(&e.subject), pos.get(&e.object)) {
            m[a][b] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if m[i][j] {
                out.insert((ids[i], ids[j]));
            }
        }
    }
    out
}

/// Descendants (including `root`) by breadth-first search over the isa
/// edges, scanning the whole edge list at every step.
pub fn bfs_descendants(ontology: &Ontology, root: ClassId) -> BTreeSet<ClassId> {
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        for e in ontology.edges() {
            if e.kind == Isa && e.object == c && seen.insert(e.subject) {
                queue.push_back(e.subject);
            }
        }
    }
    seen
}

/// Resource IRIs in scope: categories at most `max_depth` narrower steps
/// from the root, computed level by level.
pub fn bfs_scope(dataset: &ExternalDataset, root: &str, max_depth: usize) -> BTreeSet<String> {
    let mut level: BTreeSet<String> = BTreeSet::from([root.to_string()]);
    let mut all = level.clone();
    for _ in 0..max_depth {
        let next: BTreeSet<String> = dataset
            .broader_edges
            .iter()
            .filter(|(_, broader)| level.contains(broader))
            .map(|(cat, _)| cat.clone())
            .filter(|c| !all.contains(c))
            .collect();
        all.extend(next.iter().cloned());
        level = next;
    }
    dataset
        .resources
        .values()
        .filter(|r| r.categories.iter().any(|c| all.contains(c)))
        .map(|r| r.iri.clone())
        .collect()
}

fn fold(text: &str) -> String {
    text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Every `(class, resource)` pair tested directly; returns
/// `(class, iri, "LABEL" | "WIKI_REF")`.
pub fn all_pairs_align(
    ontology: &Ontology,
    dataset: &ExternalDataset,
    root: &str,
    max_depth: usize,
) -> BTreeSet<(ClassId, String, &'static str)> {
    let scope = bfs_scope(dataset, root, max_depth);
    let mut out = BTreeSet::new();
    for class in ontology.classes() {
        for resource in dataset.resources.values() {
            if !scope.contains(&resource.iri) {
                continue;
            }
            let label = class.labels.iter().any(|l| {
                resource.labels.iter().any(|rl| rl.lang == l.lang.as_str() && fold(&rl.text) == fold(&l.text))
            });
            let wiki = class.definition_url.as_ref().is_some_and(|u| {
                resource
                    .primary_topic_of
                    .iter()
                    .any(|p| p.trim_end_matches('/') == u.trim_end_matches('/'))
            });
            if label {
                out.insert((class.id, resource.iri.clone(), "LABEL"));
            } else if wiki {
                out.insert((class.id, resource.iri.clone(), "WIKI_REF"));
            }
        }
    }
    out
}

/// Brute-force search: every symbol occurrence is checked against the
/// expanded concept set and the filter, then sorted and paged.
pub fn scan_search(ontology: &Ontology, corpus: &Corpus, query: &SearchQuery) -> (usize, Vec<SearchHit>) {
    let concepts = if query.include_subclasses {
        bfs_descendants(ontology, query.concept_id)
    } else {
        BTreeSet::from([query.concept_id])
    };
    let mut hits: Vec<SearchHit> = Vec::new();
    for occ in corpus.symbols() {
        if !concepts.contains(&occ.concept_id) {
            continue;
        }
        let formula = corpus.formula(&occ.formula_id).unwrap();
        let segment = corpus.segment(&formula.segment_id).unwrap();
        if !query.segment_filter.is_empty() && !query.segment_filter.contains(&segment.segment_type) {
            continue;
        }
        hits.push(SearchHit {
            concept_id: occ.concept_id,
            symbol: occ.symbol.clone(),
            formula_id: occ.formula_id.clone(),
            markup: formula.markup.clone(),
            segment_type: segment.segment_type,
            article_id: segment.article_id.clone(),
        });
    }
    hits.sort_by(|a, b| {
        (&a.article_id, &a.formula_id, &a.symbol, a.concept_id).cmp(&(&b.article_id, &b.formula_id, &b.symbol, b.concept_id))
    });
    let total = hits.len();
    let page = hits.into_iter().skip((query.page - 1) * query.page_size).take(query.page_size).collect();
    (total, page)
}

/// Record counts per `kind`, read straight off the JSON lines.
pub fn tally_kinds(jsonl: &str) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for line in jsonl.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).expect("valid json line");
        *out.entry(v["kind"].as_str().unwrap().to_string()).or_default() += 1;
    }
    out
}

/// Plain set scores, P = 0 / R = 0 for empty sets.
pub fn set_scores(submitted: &BTreeSet<Edge>, gold: &BTreeSet<Edge>) -> (f64, f64) {
    let common = submitted.iter().filter(|e| gold.contains(e)).count() as f64;
    let p = if submitted.is_empty() { 0.0 } else { common / submitted.len() as f64 };
    let r = if gold.is_empty() { 0.0 } else { common / gold.len() as f64 };
    (p, r)
}

/// Kahn's algorithm over isa edges; `None` when a cycle remains.
pub fn toposort(ontology: &Ontology) -> Option<Vec<ClassId>> {
    let mut indegree: BTreeMap<ClassId, usize> = ontology.classes().map(|c| (c.id, 0)).collect();
    for e in ontology.edges().iter().filter(|e| e.kind == Isa) {
        *indegree.entry(e.object).or_default() += 1;
        indegree.entry(e.subject).or_default();
    }
    let mut ready: Vec<ClassId> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&c, _)| c).collect();
    let mut order = Vec::new();
    while let Some(c) = ready.pop() {
        order.push(c);
        for e in ontology.edges().iter().filter(|e| e.kind == Isa && e.subject == c) {
            let d = indegree.get_mut(&e.object).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(e.object);
            }
        }
    }
    (order.len() == indegree.len()).then_some(order)
}
