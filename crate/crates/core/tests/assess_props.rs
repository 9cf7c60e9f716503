use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use ontohub_core::assess::{
    aggregate, categorize_edge, extract_fragment, f_score, gold_edges, round2, score, EdgeCategory, Fragment, Group,
    ScoreConfig, Submission, SubmissionEdge, SubmissionKind,
};
use ontohub_core::reasoner::{ReasonerConfig, Rule};
use ontohub_core::turtle::parse_turtle;
use ontohub_core::{ClassId, Edge, Label, Ontology, OntologyClass, RelationKind};
use ontohub_testkit::generate::{random_fragment, rng};
use ontohub_testkit::oracle::{naive_closure, set_scores};
use ontohub_testkit::read_fixture;

fn id(n: u32) -> ClassId {
    ClassId::new(n)
}

fn to_submission(edges: impl IntoIterator<Item = Edge>, group: Group) -> Submission {
    Submission {
        participant_id: "p".into(),
        group,
        edges: edges
            .into_iter()
            .map(|e| SubmissionEdge {
                subject: e.subject,
                kind: if e.kind == RelationKind::Isa { SubmissionKind::Isa } else { SubmissionKind::Solves },
                object: e.object,
            })
            .collect(),
    }
}

fn whole_fragment(o: &Ontology, task_root: ClassId, method_root: ClassId) -> Fragment {
    let seeds = o.classes().map(|c| c.id).collect();
    extract_fragment(o, &seeds, task_root, method_root).unwrap()
}

fn fixture_fragment() -> Fragment {
    let o = parse_turtle(&read_fixture("assessment.ttl")).unwrap();
    whole_fragment(&o, id(444), id(5010))
}

#[test]
fn fixture_fragment_matches_hand_count() {
    let f = fixture_fragment();
    assert_eq!(f.classes().count(), 14);
    let isa = f.edges().iter().filter(|e| e.kind == RelationKind::Isa).count();
    let solves = f.edges().iter().filter(|e| e.kind == RelationKind::Solves).count();
    assert_eq!((isa, solves, f.edges().len()), (12, 4, 16));
    assert!(f.edges().contains(&Edge::new(id(660), RelationKind::Solves, id(5001))));
}

#[test]
fn fixture_submissions_parse_and_score() {
    let f = fixture_fragment();
    for name in ["u3-01.json", "m2-01.json", "phd-01.json"] {
        let s = Submission::from_json(&read_fixture(&format!("submissions/{name}"))).unwrap();
        let r = score(&f, &s, &ScoreConfig::default());
        for scores in r.per_category.values().chain([&r.total]) {
            assert!((0.0..=1.0).contains(&scores.precision) && (0.0..=1.0).contains(&scores.recall));
        }
    }
    let m2 = Submission::from_json(&read_fixture("submissions/m2-01.json")).unwrap();
    // The task-under-method edge crosses the trees.
    assert_eq!(score(&f, &m2, &ScoreConfig::default()).excluded_edge_count, 1);
}

/// Task root T, t isa T, t1 isa t; method root M, m isa M, m1 isa m; m P6 t.
#[test]
fn six_class_recall_matches_oracle() {
    let (tr, t, t1, mr, m, m1) = (id(1), id(2), id(3), id(4), id(5), id(6));
    let mut b = Ontology::builder();
    for c in [tr, t, t1, mr, m, m1] {
        b.add_class(OntologyClass::new(c).with_label(Label::en(c.to_string())));
    }
    let o = b
        .edge(t, RelationKind::Isa, tr)
        .edge(t1, RelationKind::Isa, t)
        .edge(m, RelationKind::Isa, mr)
        .edge(m1, RelationKind::Isa, m)
        .edge(m, RelationKind::Solves, t)
        .build();
    let f = whole_fragment(&o, tr, mr);
    let submitted = vec![Edge::isa(t, tr), Edge::isa(t1, t), Edge::isa(m, mr), Edge::isa(m1, m), Edge::new(m1, RelationKind::Solves, t1)];
    let r = score(&f, &to_submission(submitted.clone(), Group::Phd), &ScoreConfig::default());

    let config = ReasonerConfig::with_rules([Rule::IsaTransitivity, Rule::SolvesInheritance]);
    let solves = |edges: BTreeSet<Edge>| -> BTreeSet<Edge> {
        naive_closure(&edges, &config).into_iter().filter(|e| e.kind == RelationKind::Solves).collect()
    };
    let (p, rec) = set_scores(&solves(submitted.into_iter().collect()), &solves(o.edges().clone()));
    let got = r.per_category[&EdgeCategory::Solves];
    assert_eq!((got.precision, got.recall), (p, rec));
    assert_eq!((p, rec), (1.0, 0.25));
}

fn correct_submission(r: &mut impl Rng, f: &Fragment) -> Vec<Edge> {
    let gold = gold_edges(f);
    let mut edges: Vec<Edge> = f.edges().iter().filter(|e| e.kind == RelationKind::Isa).copied().collect();
    let solves: Vec<Edge> = gold.iter().filter(|e| e.kind == RelationKind::Solves).copied().collect();
    let k = r.gen_range(1..=solves.len());
    edges.extend(solves.choose_multiple(r, k).copied());
    edges
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn specialising_solves_keeps_precision(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (o, tr, mr) = random_fragment(&mut r);
        let f = whole_fragment(&o, tr, mr);
        let edges = correct_submission(&mut r, &f);
        let config = ScoreConfig::default();
        let before = score(&f, &to_submission(edges.clone(), Group::Master1), &config).per_category[&EdgeCategory::Solves];
        prop_assert_eq!(before.precision, 1.0);

        for (i, e) in edges.iter().enumerate().filter(|(_, e)| e.kind == RelationKind::Solves) {
            let ms: Vec<ClassId> = o.descendants_or_self(e.subject).into_iter().collect();
            let ts: Vec<ClassId> = o.descendants_or_self(e.object).into_iter().collect();
            let mut changed = edges.clone();
            changed[i] = Edge::new(*ms.choose(&mut r).unwrap(), RelationKind::Solves, *ts.choose(&mut r).unwrap());
            let after = score(&f, &to_submission(changed, Group::Master1), &config).per_category[&EdgeCategory::Solves];
            prop_assert_eq!(after.precision, 1.0);
            prop_assert!(after.recall <= before.recall);
        }
    }

    #[test]
    fn full_materialization_scores_one(seed in any::<u64>()) {
        let (o, tr, mr) = random_fragment(&mut rng(seed));
        let f = whole_fragment(&o, tr, mr);
        let r = score(&f, &to_submission(gold_edges(&f), Group::Phd), &ScoreConfig::default());
        for c in EdgeCategory::ALL {
            let s = r.per_category[&c];
            if gold_edges(&f).iter().any(|e| categorize_edge(&f, e) == Ok(c)) {
                prop_assert_eq!((s.precision, s.recall), (1.0, 1.0));
            }
        }
        prop_assert_eq!((r.total.precision, r.total.recall, r.total.f_score), (1.0, 1.0, 1.0));
    }

    #[test]
    fn adding_edges_moves_scores_the_right_way(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (o, tr, mr) = random_fragment(&mut r);
        let f = whole_fragment(&o, tr, mr);
        let gold: Vec<Edge> = gold_edges(&f).into_iter().collect();
        let ids: Vec<ClassId> = o.classes().map(|c| c.id).collect();
        let mut base: Vec<Edge> = gold.choose_multiple(&mut r, gold.len() / 2).copied().collect();
        // Some noise that is wrong but still categorizable.
        for _ in 0..3 {
            let e = Edge::new(*ids.choose(&mut r).unwrap(), RelationKind::Solves, *ids.choose(&mut r).unwrap());
            if !gold.contains(&e) {
                base.push(e);
            }
        }
        let on = ScoreConfig::default();
        let off = ScoreConfig { materialize_submission: false };
        let before_on = score(&f, &to_submission(base.clone(), Group::Master2), &on);
        let before_off = score(&f, &to_submission(base.clone(), Group::Master2), &off);

        let correct = *gold.choose(&mut r).unwrap();
        let mut more = base.clone();
        more.push(correct);
        prop_assert!(score(&f, &to_submission(more.clone(), Group::Master2), &on).total.recall >= before_on.total.recall);
        prop_assert!(score(&f, &to_submission(more, Group::Master2), &off).total.recall >= before_off.total.recall);

        let wrong = Edge::new(*ids.choose(&mut r).unwrap(), RelationKind::Solves, *ids.choose(&mut r).unwrap());
        if !gold.contains(&wrong) {
            let mut more = base.clone();
            more.push(wrong);
            prop_assert!(score(&f, &to_submission(more, Group::Master2), &off).total.precision <= before_off.total.precision);
        }
    }

    #[test]
    fn score_ignores_edge_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (o, tr, mr) = random_fragment(&mut r);
        let f = whole_fragment(&o, tr, mr);
        let mut edges = correct_submission(&mut r, &f);
        edges.push(Edge::isa(tr, mr));
        let a = score(&f, &to_submission(edges.clone(), Group::Undergrad3), &ScoreConfig::default());
        edges.shuffle(&mut r);
        let b = score(&f, &to_submission(edges, Group::Undergrad3), &ScoreConfig::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn f_score_properties(p in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        let f = f_score(p, r);
        prop_assert_eq!(f, f_score(r, p));
        prop_assert!(f <= p.max(r) + 1e-12);
        prop_assert!(f >= p.min(r) - 1e-12 || p + r == 0.0);
        prop_assert!((f_score(p, p) - p).abs() < 1e-12);
    }
}

#[test]
fn aggregate_matches_spreadsheet_means() {
    let f = fixture_fragment();
    let gold: Vec<Edge> = gold_edges(&f).into_iter().collect();
    let mut r = rng(42);
    let mut reports = Vec::new();
    for group in Group::ALL.into_iter().rev() {
        for i in 0..4 {
            let k = r.gen_range(0..gold.len());
            let mut sub = to_submission(gold.choose_multiple(&mut r, k).copied(), group);
            sub.participant_id = format!("{group}-{i}");
            reports.push(score(&f, &sub, &ScoreConfig::default()));
        }
    }
    let summaries = aggregate(&reports);
    assert_eq!(summaries.iter().map(|s| s.group).collect::<Vec<_>>(), Group::ALL.to_vec());
    for s in &summaries {
        let members: Vec<_> = reports.iter().filter(|r| r.group == s.group).collect();
        let mean = |cell: &dyn Fn(&ontohub_core::assess::AssessmentReport) -> f64| {
            let sum: f64 = members.iter().map(|r| cell(r)).sum();
            (sum / members.len() as f64 * 100.0).round() / 100.0
        };
        assert_eq!(s.total.precision, mean(&|r| r.total.precision));
        assert_eq!(s.total.f_score, mean(&|r| r.total.f_score));
        for c in EdgeCategory::ALL {
            assert_eq!(s.per_category[&c].recall, mean(&|r| r.per_category[&c].recall));
        }
    }
    assert_eq!(round2(0.7), 0.7);
}
