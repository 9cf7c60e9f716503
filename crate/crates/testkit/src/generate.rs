use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::json;

use ontohub_core::{ClassId, Edge, Label, Lang, Ontology, OntologyClass, RelationKind};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "space", "operator", "metric", "Chebyshev", "iteration", "field", "set", "map", "Cauchy's", "inequality",
    "\"quoted\"", "back\\slash", "tab\there", "line\nbreak", "геометрия", "оператор", "связность", "λ-calculus",
    "ℝ^n", "naïve",
];

fn phrase(rng: &mut StdRng) -> String {
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// Distinct class ids drawn from `1..=4 * n`.
pub fn class_ids(rng: &mut StdRng, n: usize) -> Vec<ClassId> {
    let mut pool: Vec<u32> = (1..=(4 * n as u32).max(4)).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool.into_iter().map(ClassId::new).collect()
}

/// A random ontology whose isa graph is acyclic: isa edges only point from a
/// later class to an earlier one in a shuffled order. Labels exercise
/// escaping; some classes have definitions or definition URLs.
pub fn random_ontology(rng: &mut StdRng, max_classes: usize, max_edges: usize) -> Ontology {
    let n = rng.gen_range(1..=max_classes);
    let ids = class_ids(rng, n);
    let mut b = Ontology::builder();
    for &id in &ids {
        let mut class = OntologyClass::new(id);
        for _ in 0..rng.gen_range(1..=3) {
            let lang = *Lang::ALL.choose(rng).unwrap();
            class = class.with_label(Label::new(lang, phrase(rng)));
        }
        match rng.gen_range(0..3) {
            0 => class = class.with_definition(phrase(rng)),
            1 => class = class.with_definition_url(format!("https://en.wikipedia.org/wiki/Page_{}", id.number())),
            _ => {}
        }
        b.add_class(class);
    }
    let m = rng.gen_range(0..=max_edges);
    for _ in 0..m {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let kind = *RelationKind::ALL.choose(rng).unwrap();
        if kind == RelationKind::Isa {
            if i == j {
                continue;
            }
            let (child, parent) = if i > j { (i, j) } else { (j, i) };
            b.add_edge(Edge::isa(ids[child], ids[parent]));
        } else {
            b.add_edge(Edge::new(ids[i], kind, ids[j]));
        }
    }
    b.build()
}

/// Random forest below `root`: every new node picks an existing parent, and
/// occasionally a second one.
fn random_tree(rng: &mut StdRng, nodes: &[ClassId], edges: &mut BTreeSet<Edge>) {
    for (i, &c) in nodes.iter().enumerate().skip(1) {
        let p = nodes[rng.gen_range(0..i)];
        edges.insert(Edge::isa(c, p));
        if i > 1 && rng.gen_bool(0.2) {
            let q = nodes[rng.gen_range(0..i)];
            if q != p {
                edges.insert(Edge::isa(c, q));
            }
        }
    }
}

/// A task/method gold fragment: returns the ontology, task root and method
/// root. Solves edges link random methods to random tasks.
pub fn random_fragment(rng: &mut StdRng) -> (Ontology, ClassId, ClassId) {
    let tasks_n = rng.gen_range(2..=8);
    let methods_n = rng.gen_range(2..=10);
    let ids = class_ids(rng, tasks_n + methods_n);
    let (tasks, methods) = ids.split_at(tasks_n);
    let mut edges = BTreeSet::new();
    random_tree(rng, tasks, &mut edges);
    random_tree(rng, methods, &mut edges);
    for _ in 0..rng.gen_range(1..=4) {
        let m = *methods.choose(rng).unwrap();
        let t = *tasks.choose(rng).unwrap();
        edges.insert(Edge::new(m, RelationKind::Solves, t));
    }
    let mut b = Ontology::builder();
    for &id in &ids {
        b.add_class(OntologyClass::new(id).with_label(Label::en(format!("class {}", id.number()))));
    }
    for e in edges {
        b.add_edge(e);
    }
    (b.build(), tasks[0], methods[0])
}

const SEGMENT_TYPES: &[&str] = &["theorem", "lemma", "definition", "proof", "corollary", "remark", "example", "other", "scholium"];

/// A JSON Lines corpus with exactly `occurrences` symbol records whose
/// concepts are drawn from `concepts`.
pub fn random_corpus(rng: &mut StdRng, concepts: &[ClassId], occurrences: usize) -> String {
    let articles = (occurrences / 40).max(1);
    let segments = (occurrences / 10).max(1);
    let formulas = (occurrences / 3).max(1);
    let mut lines: Vec<String> = Vec::new();
    for a in 0..articles {
        let mut rec = json!({
            "kind": "article",
            "articleId": format!("art{a:03}"),
            "title": format!("Article {a}"),
            "authors": [format!("Author {}", a % 7)],
            "year": 2000 + (a % 20) as i32,
            "metadataUrl": format!("http://example.org/art{a:03}"),
        });
        if rng.gen_bool(0.5) {
            rec["pdfUrl"] = json!(format!("http://example.org/art{a:03}.pdf"));
        }
        lines.push(rec.to_string());
    }
    for s in 0..segments {
        lines.push(
            json!({
                "kind": "segment",
                "segmentId": format!("seg{s:04}"),
                "articleId": format!("art{:03}", rng.gen_range(0..articles)),
                "type": SEGMENT_TYPES.choose(rng).unwrap(),
                "text": phrase(rng),
            })
            .to_string(),
        );
    }
    for f in 0..formulas {
        lines.push(
            json!({
                "kind": "formula",
                "formulaId": format!("f{f:05}"),
                "segmentId": format!("seg{:04}", rng.gen_range(0..segments)),
                "markup": format!("x_{f} = {}", rng.gen_range(0..100)),
            })
            .to_string(),
        );
    }
    let symbols = ["x", "y", "λ", "A", "\\tau_k", "T"];
    for _ in 0..occurrences {
        lines.push(
            json!({
                "kind": "symbol",
                "formulaId": format!("f{:05}", rng.gen_range(0..formulas)),
                "symbol": symbols.choose(rng).unwrap(),
                "conceptId": concepts.choose(rng).unwrap().to_string(),
            })
            .to_string(),
        );
    }
    for _ in 0..occurrences / 5 {
        lines.push(
            json!({
                "kind": "text",
                "segmentId": format!("seg{:04}", rng.gen_range(0..segments)),
                "surface": phrase(rng),
                "conceptId": concepts.choose(rng).unwrap().to_string(),
            })
            .to_string(),
        );
    }
    lines.shuffle(rng);
    lines.join("\n") + "\n"
}

pub const DBR: &str = "http://dbpedia.org/resource/";
const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
const SUBJECT: &str = "http://purl.org/dc/terms/subject";
const BROADER: &str = "http://www.w3.org/2004/02/skos/core#broader";
const TOPIC_OF: &str = "http://xmlns.com/foaf/0.1/isPrimaryTopicOf";

fn literal(text: &str) -> String {
    let mut out = String::from("\"");
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// N-Triples dump with a 20-category tree under `Category:Root`, a 7-step
/// chain `Category:Deep1 .. Deep7` below the root with `Deep_resource`
/// filed only under `Deep6`, an unrelated
/// `Category:Other` tree, and resources whose labels or Wikipedia pages
/// sometimes coincide with those of `ontology`.
pub fn random_dataset(rng: &mut StdRng, ontology: &Ontology) -> String {
    let mut out = String::new();
    let cat = |name: &str| format!("{DBR}Category:{name}");
    let mut cats = vec![cat("Root")];
    for i in 1..20 {
        let c = cat(&format!("C{i}"));
        let parent = cats[rng.gen_range(0..cats.len())].clone();
        let _ = writeln!(out, "<{c}> <{BROADER}> <{parent}> .");
        cats.push(c);
    }
    let mut prev = cat("Root");
    for d in 1..=7 {
        let c = cat(&format!("Deep{d}"));
        let _ = writeln!(out, "<{c}> <{BROADER}> <{prev}> .");
        cats.push(c.clone());
        prev = c;
    }
    let _ = writeln!(out, "<{}> <{BROADER}> <{}> .", cat("Other1"), cat("Other"));
    cats.push(cat("Other1"));
    cats.push(cat("Other"));

    let _ = writeln!(out, "<{DBR}Deep_resource> <{SUBJECT}> <{}> .", cat("Deep6"));
    let _ = writeln!(out, "<{DBR}Deep_resource> <{LABEL}> \"deep\"@en .");

    let classes: Vec<&OntologyClass> = ontology.classes().collect();
    for r in 0..60 {
        let iri = format!("{DBR}Resource_{r}");
        let _ = writeln!(out, "<{iri}> <{SUBJECT}> <{}> .", cats.choose(rng).unwrap());
        if rng.gen_bool(0.2) {
            let _ = writeln!(out, "<{iri}> <{SUBJECT}> <{}> .", cats.choose(rng).unwrap());
        }
        let class = classes.choose(rng);
        for _ in 0..rng.gen_range(1..=2) {
            let (lang, text) = match (rng.gen_range(0..4), class) {
                (0 | 1, Some(c)) => {
                    let l = c.labels.choose(rng).unwrap();
                    let text = if rng.gen_bool(0.5) { l.text.to_uppercase() } else { format!("  {}  ", l.text) };
                    let lang = if rng.gen_bool(0.8) { l.lang.as_str() } else { "de" };
                    (lang, text)
                }
                _ => ("en", phrase(rng)),
            };
            let _ = writeln!(out, "<{iri}> <{LABEL}> {}@{lang} .", literal(&text));
        }
        if let (true, Some(c)) = (rng.gen_bool(0.3), class) {
            if let Some(url) = &c.definition_url {
                let page = if rng.gen_bool(0.5) { format!("{url}/") } else { url.clone() };
                let _ = writeln!(out, "<{iri}> <{TOPIC_OF}> <{page}> .");
            }
        }
    }
    out
}
