//! Demo operations over the bundled sample data. Results are JSON text.

use serde_json::{json, Value};

use ontohub_core::assess::{aggregate, extract_fragment, render_table, score, Fragment, ScoreConfig, Submission};
use ontohub_core::dataset::{parse_dataset, ExternalDataset};
use ontohub_core::interlink::{parse_close_match, CloseMatch};
use ontohub_core::mathsearch::{build_index, hit_details, load_corpus, search, suggest, Corpus, Index, SearchQuery, SegmentType};
use ontohub_core::reasoner::{materialize, serialize_materialized, ReasonerConfig, Rule};
use ontohub_core::turtle::parse_turtle;
use ontohub_core::{ClassId, Lang, Ontology};

const ONTOLOGY: &[u8] = include_bytes!("../../../fixtures/ontology.ttl");
const CORPUS: &[u8] = include_bytes!("../../../fixtures/corpus.jsonl");
const LINKS: &[u8] = include_bytes!("../../../fixtures/links.ttl");
const DATASET: &[u8] = include_bytes!("../../../fixtures/dataset.nt");
const ASSESSMENT: &[u8] = include_bytes!("../../../fixtures/assessment.ttl");
pub const SAMPLE_SUBMISSION: &str = include_str!("../../../fixtures/submissions/u3-01.json");

fn sorted(value: &impl serde::Serialize) -> String {
    serde_json::to_value(value).map(|v| v.to_string()).expect("demo values serialize")
}

pub struct Hub {
    ontology: Ontology,
    corpus: Corpus,
    index: Index,
    links: Vec<CloseMatch>,
    dataset: ExternalDataset,
    fragment: Fragment,
}

impl Hub {
    pub fn bundled() -> Hub {
        let ontology = parse_turtle(ONTOLOGY).expect("bundled ontology parses");
        let corpus = load_corpus(CORPUS).expect("bundled corpus loads");
        let index = build_index(&corpus, &ontology);
        let gold = parse_turtle(ASSESSMENT).expect("bundled fragment parses");
        let seeds = gold.classes().map(|c| c.id).collect();
        let fragment = extract_fragment(&gold, &seeds, ClassId::new(444), ClassId::new(5010)).expect("bundled fragment is valid");
        Hub {
            links: parse_close_match(LINKS).expect("bundled links parse"),
            dataset: parse_dataset(DATASET).expect("bundled dataset parses"),
            ontology,
            corpus,
            index,
            fragment,
        }
    }

    pub fn suggest(&self, prefix: &str, lang: &str, limit: usize) -> Result<String, String> {
        let lang = match lang {
            "" => None,
            l => Some(l.parse::<Lang>().map_err(|e| e.to_string())?),
        };
        suggest(&self.ontology, &self.links, &self.dataset, prefix, lang, limit)
            .map(|s| sorted(&s))
            .map_err(|e| e.to_string())
    }

    /// `segments` is a comma list of segment type names.
    pub fn search(&self, concept: &str, subclasses: bool, segments: &str, page: usize, page_size: usize) -> Result<String, String> {
        let mut q = SearchQuery::new(concept.parse::<ClassId>().map_err(|e| e.to_string())?);
        q.include_subclasses = subclasses;
        for name in segments.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            q.segment_filter.insert(name.parse::<SegmentType>()?);
        }
        q.page = page;
        q.page_size = page_size;
        let page = search(&self.index, &self.corpus, &self.ontology, &q).map_err(|e| e.to_string())?;
        Ok(sorted(&page))
    }

    pub fn details(&self, formula_id: &str) -> Result<String, String> {
        hit_details(&self.corpus, formula_id)
            .map(|d| sorted(&d))
            .map_err(|e| format!("formula {} not found", e.0))
    }

    /// Scores a pasted submission against the bundled gold fragment.
    pub fn assess(&self, submission_json: &str) -> Result<String, String> {
        let submission = Submission::from_json(submission_json.as_bytes()).map_err(|e| e.to_string())?;
        let report = score(&self.fragment, &submission, &ScoreConfig::default());
        let table = render_table(&aggregate(std::slice::from_ref(&report)));
        Ok(json!({ "report": serde_json::to_value(&report).unwrap(), "table": table }).to_string())
    }
}

/// Materializes pasted Turtle. `rules` is a comma list; empty means all.
pub fn materialize_text(turtle: &str, rules: &str) -> Result<String, String> {
    let ontology = parse_turtle(turtle.as_bytes())
        .map_err(|errs| errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))?;
    let config = if rules.trim().is_empty() {
        ReasonerConfig::default()
    } else {
        ReasonerConfig::with_rules(rules.split(',').map(str::parse::<Rule>).collect::<Result<Vec<_>, _>>()?)
    };
    let graph = materialize(&ontology, &config).map_err(|e| e.to_string())?;
    let out: Value = json!({
        "asserted": ontology.edges().len(),
        "inferred": graph.inferred_only().len(),
        "turtle": serialize_materialized(&ontology, &graph),
    });
    Ok(out.to_string())
}
