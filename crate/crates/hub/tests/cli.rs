use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;

use serde_json::Value;

use ontohub_core::reasoner::{ReasonerConfig, Rule};
use ontohub_core::{parse_turtle, ClassId, Edge, RelationKind};
use ontohub_testkit::fixture;
use ontohub_testkit::oracle::{bfs_descendants, naive_closure, set_scores};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ontohub(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ontohub")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn validate_clean_fixture() {
    let r = ontohub(&["validate", "--ontology", &path("ontology.ttl")]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "0 violations\n"));
    let r = ontohub(&["validate", "--ontology", &path("ontology.ttl"), "--strict", "--json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim(), r#"{"count":0,"violations":[]}"#);
}

#[test]
fn validate_reports_domain_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.ttl");
    std::fs::write(
        &cyclic,
        "@prefix ompro: <http://ontomathpro.org/ontology/> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
         @prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
         ompro:E7 a owl:Class ; rdfs:subClassOf ompro:E8 .\nompro:E8 a owl:Class ; rdfs:subClassOf ompro:E7 .\n",
    )
    .unwrap();
    let r = ontohub(&["validate", "--ontology", cyclic.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("ISA_CYCLE"));

    let broken = dir.path().join("broken.ttl");
    std::fs::write(&broken, "ompro:E1 a owl:Class").unwrap();
    let r = ontohub(&["stats", "--ontology", broken.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("broken.ttl:1:"), "{}", r.stderr);

    let r = ontohub(&["materialize", "--ontology", cyclic.to_str().unwrap(), "--out", dir.path().join("m.ttl").to_str().unwrap()]);
    assert_eq!(r.code, 1);
}

#[test]
fn usage_errors() {
    let r = ontohub(&["transmogrify"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Usage"));
    assert_eq!(ontohub(&["validate"]).code, 2);
    assert_eq!(ontohub(&["materialize", "--ontology", &path("ontology.ttl"), "--out", "/tmp/x", "--rules", "NOPE"]).code, 2);
    assert_eq!(ontohub(&["serve"]).code, 2);
}

#[test]
fn stats_json_matches_tally() {
    let r = ontohub(&["stats", "--ontology", &path("ontology.ttl"), "--json"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!((v["classCount"].as_u64(), v["isaEdgeCount"].as_u64(), v["otherEdgeCount"].as_u64()), (Some(26), Some(27), Some(7)));
}

#[test]
fn materialize_writes_annotated_closure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("closed.ttl");
    let r = ontohub(&["materialize", "--ontology", &path("ontology.ttl"), "--out", out.to_str().unwrap(), "--rules", "ISA_TRANSITIVITY"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().filter(|l| l.contains("# inferred:")).all(|l| l.ends_with("# inferred: ISA_TRANSITIVITY")));

    // Stripping the comments leaves a parseable file whose edges are the closure.
    let o = parse_turtle(&std::fs::read(fixture("ontology.ttl")).unwrap()).unwrap();
    let closed = parse_turtle(text.as_bytes()).unwrap();
    let expected = naive_closure(o.edges(), &ReasonerConfig::with_rules([Rule::IsaTransitivity]));
    assert_eq!(closed.edges(), &expected);

    let r = ontohub(&["materialize", "--ontology", &path("ontology.ttl"), "--out", out.to_str().unwrap(), "--solves-dir", "down"]);
    assert_eq!(r.code, 2);
}

#[test]
fn align_reproduces_golden_links() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("links.ttl");
    let r = ontohub(&[
        "align",
        "--ontology",
        &path("ontology.ttl"),
        "--dataset",
        &path("dataset.nt"),
        "--root-category",
        "http://dbpedia.org/resource/Category:Mathematics",
        "--depth",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(fixture("links.ttl")).unwrap());
}

#[test]
fn index_and_search() {
    let r = ontohub(&["index", "--ontology", &path("ontology.ttl"), "--corpus", &path("corpus.jsonl")]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["concepts"]["E660"], 2);

    let r = ontohub(&["search", "--ontology", &path("ontology.ttl"), "--corpus", &path("corpus.jsonl"), "--concept", "E449", "--json"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["total"], 2);
    let r = ontohub(&[
        "search", "--ontology", &path("ontology.ttl"), "--corpus", &path("corpus.jsonl"), "--concept", "E660", "--segments", "theorem", "--json",
    ]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["total"], 1);
    let r = ontohub(&["search", "--ontology", &path("ontology.ttl"), "--corpus", &path("corpus.jsonl"), "--concept", "E999999"]);
    assert_eq!(r.code, 1);
}

/// Scores recomputed from the submission files with set arithmetic over a
/// naive closure.
fn oracle_scores(gold_path: &Path, submission: &Value) -> BTreeMap<&'static str, (f64, f64)> {
    let o = parse_turtle(&std::fs::read(gold_path).unwrap()).unwrap();
    let id = |s: &str| s.parse::<ClassId>().unwrap();
    let tasks = bfs_descendants(&o, id("E444"));
    let methods = bfs_descendants(&o, id("E5010"));
    let config = ReasonerConfig::with_rules([Rule::IsaTransitivity, Rule::SolvesInheritance]);
    let keep = |e: &Edge| matches!(e.kind, RelationKind::Isa | RelationKind::Solves);

    let asserted: BTreeSet<Edge> = o
        .edges()
        .iter()
        .map(|e| if e.kind == RelationKind::SolvedBy { Edge::new(e.object, RelationKind::Solves, e.subject) } else { *e })
        .filter(keep)
        .collect();
    let gold: BTreeSet<Edge> = naive_closure(&asserted, &config).into_iter().filter(keep).collect();

    let mut sub = BTreeSet::new();
    for e in submission["edges"].as_array().unwrap() {
        let (s, o2) = (id(e["subject"].as_str().unwrap()), id(e["object"].as_str().unwrap()));
        let kind = if e["kind"] == "isa" { RelationKind::Isa } else { RelationKind::Solves };
        let same_tree = (tasks.contains(&s) && tasks.contains(&o2)) || (methods.contains(&s) && methods.contains(&o2));
        if kind == RelationKind::Solves || same_tree {
            sub.insert(Edge::new(s, kind, o2));
        }
    }
    let sub: BTreeSet<Edge> = naive_closure(&sub, &config).into_iter().filter(keep).collect();

    let part = |set: &BTreeSet<Edge>, cat: &str| -> BTreeSet<Edge> {
        set.iter()
            .filter(|e| match cat {
                "ISA_TASKS" => e.kind == RelationKind::Isa && tasks.contains(&e.subject),
                "ISA_METHODS" => e.kind == RelationKind::Isa && methods.contains(&e.subject),
                _ => e.kind == RelationKind::Solves,
            })
            .copied()
            .collect()
    };
    let mut out = BTreeMap::new();
    for cat in ["ISA_TASKS", "ISA_METHODS", "SOLVES"] {
        out.insert(cat, set_scores(&part(&sub, cat), &part(&gold, cat)));
    }
    out.insert("total", set_scores(&sub, &gold));
    out
}

#[test]
fn assess_matches_set_oracle() {
    let subs = ["u3-01.json", "m2-01.json", "phd-01.json"].map(|n| path(&format!("submissions/{n}")));
    let gold = path("assessment.ttl");
    let mut args = vec!["assess", "--gold", gold.as_str(), "--json", "--submission"];
    args.extend(subs.iter().map(String::as_str));
    let r = ontohub(&args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    for report in v["reports"].as_array().unwrap() {
        let pid = report["participantId"].as_str().unwrap();
        let sub: Value = serde_json::from_slice(&std::fs::read(fixture(&format!("submissions/{pid}.json"))).unwrap()).unwrap();
        for (cat, (p, rec)) in oracle_scores(&fixture("assessment.ttl"), &sub) {
            let cell = if cat == "total" { &report["total"] } else { &report["perCategory"][cat] };
            assert_eq!((cell["precision"].as_f64().unwrap(), cell["recall"].as_f64().unwrap()), (p, rec), "{pid} {cat}");
        }
    }
    assert_eq!(v["reports"][1]["excludedEdgeCount"], 1);
}

#[test]
fn assess_prints_aligned_table() {
    let r = ontohub(&[
        "assess",
        "--gold",
        &path("assessment.ttl"),
        "--submission",
        &path("submissions/u3-01.json"),
        "--submission",
        &path("submissions/phd-01.json"),
    ]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("undergrad3") && lines[3].starts_with("phd"));
    // Each column heading starts where its P value starts.
    for heading in ["ISA tasks", "ISA methods", "P6 solves", "total"] {
        let col = lines[0].find(heading).unwrap();
        assert_eq!(&lines[1][col..col + 1], "P", "{heading}");
        assert!(lines[2][col..].starts_with(|c: char| c.is_ascii_digit()), "{heading}");
    }

    // Explicit roots give the same table; one root alone is a usage error.
    let explicit = ontohub(&[
        "assess", "--gold", &path("assessment.ttl"), "--task-root", "E444", "--method-root", "E5010",
        "--submission", &path("submissions/u3-01.json"), "--submission", &path("submissions/phd-01.json"),
    ]);
    assert_eq!(explicit.stdout, r.stdout);
    let one = ontohub(&["assess", "--gold", &path("assessment.ttl"), "--task-root", "E444", "--submission", &path("submissions/u3-01.json")]);
    assert_eq!(one.code, 2);
}
