//! The `ontohub` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ontohub_core::assess::{aggregate, extract_fragment, render_table, score, ScoreConfig, Submission};
use ontohub_core::dataset::parse_dataset;
use ontohub_core::interlink::{align, emit_close_match, AlignmentConfig};
use ontohub_core::mathsearch::{build_index, load_corpus, search, SearchQuery, SegmentType, DEFAULT_PAGE_SIZE};
use ontohub_core::reasoner::{materialize, serialize_materialized, Direction, ReasonerConfig, Rule};
use ontohub_core::turtle::{parse_turtle_with, ParseOptions};
use ontohub_core::{ClassId, Ontology, RelationKind};

use crate::service::{sorted_json, Hub};
use crate::snapshot::{ServiceConfig, Snapshot, PORT_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ontohub", version, about = "Ontology hub: validation, reasoning, alignment, search, assessment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OntologyArg {
    /// Ontology in the Turtle subset.
    #[arg(long)]
    ontology: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an ontology against the model invariants.
    Validate {
        #[command(flatten)]
        ontology: OntologyArg,
        /// Also require labels, definitions and root membership.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
    /// Count classes and edges.
    Stats {
        #[command(flatten)]
        ontology: OntologyArg,
        #[arg(long)]
        json: bool,
    },
    /// Write the closure of the asserted edges.
    Materialize {
        #[command(flatten)]
        ontology: OntologyArg,
        #[arg(long)]
        out: PathBuf,
        /// Comma list of rule names; all rules when absent.
        #[arg(long, value_delimiter = ',')]
        rules: Option<Vec<Rule>>,
        /// Propagation of P6 for methods and problems, e.g. `down,down`.
        #[arg(long, value_name = "METHOD,PROBLEM")]
        solves_dir: Option<String>,
    },
    /// Link ontology classes to an external dataset dump.
    Align {
        #[command(flatten)]
        ontology: OntologyArg,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        root_category: String,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the concept index of a corpus and report it.
    Index {
        #[command(flatten)]
        ontology: OntologyArg,
        #[arg(long)]
        corpus: PathBuf,
        /// Write the summary JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find formulas mentioning a concept.
    Search {
        #[command(flatten)]
        ontology: OntologyArg,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        concept: ClassId,
        /// Match only the concept itself.
        #[arg(long)]
        no_subclasses: bool,
        #[arg(long, value_delimiter = ',')]
        segments: Vec<SegmentType>,
        #[arg(long, default_value_t = 1)]
        page: usize,
        #[arg(long, default_value_t = DEFAULT_PAGE_SIZE)]
        page_size: usize,
        #[arg(long)]
        json: bool,
    },
    /// Score participant submissions against a gold fragment.
    Assess {
        /// Gold fragment in the Turtle subset.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long = "submission", required = true, num_args = 1..)]
        submissions: Vec<PathBuf>,
        /// Root of the task taxonomy; inferred when absent.
        #[arg(long)]
        task_root: Option<ClassId>,
        /// Root of the method taxonomy; inferred when absent.
        #[arg(long)]
        method_root: Option<ClassId>,
        /// Score submitted edges as given, without closing them.
        #[arg(long)]
        no_materialize: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service.
    Serve {
        /// JSON service config; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        ontology: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        links: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        port: Option<u32>,
        #[arg(long)]
        base_iri: Option<String>,
    },
}

/// A failed run: message plus exit code.
struct Failure(i32, String);

fn domain(msg: impl Into<String>) -> Failure {
    Failure(EXIT_DOMAIN, msg.into())
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn load_ontology(path: &Path, err: &mut dyn Write) -> Result<Ontology, Failure> {
    let bytes = read(path)?;
    match parse_turtle_with(&bytes, &ParseOptions::default()) {
        Ok(doc) => {
            for w in &doc.warnings {
                let _ = writeln!(err, "warning: {}: {w}", path.display());
            }
            Ok(doc.ontology)
        }
        Err(errors) => {
            let lines: Vec<String> = errors.iter().map(|e| format!("{}:{e}", path.display())).collect();
            Err(domain(lines.join("\n")))
        }
    }
}

/// Parentless classes of the gold file; the task root is the one whose
/// subtree holds the solved problems.
fn infer_roots(o: &Ontology) -> Result<(ClassId, ClassId), Failure> {
    let tops: Vec<ClassId> = o.classes().map(|c| c.id).filter(|&id| o.parents(id).is_empty()).collect();
    let [a, b] = tops[..] else {
        return Err(usage(format!(
            "cannot infer roots: expected two top classes, found {}; pass --task-root and --method-root",
            tops.len()
        )));
    };
    let solved: BTreeSet<ClassId> = o
        .edges()
        .iter()
        .filter_map(|e| match e.kind {
            RelationKind::Solves => Some(e.object),
            RelationKind::SolvedBy => Some(e.subject),
            _ => None,
        })
        .collect();
    let holds = |root: ClassId| o.descendants_or_self(root).iter().any(|c| solved.contains(c));
    match (holds(a), holds(b)) {
        (true, false) => Ok((a, b)),
        (false, true) => Ok((b, a)),
        _ => Err(usage("cannot tell task and method roots apart; pass --task-root and --method-root")),
    }
}

fn parse_solves_dir(text: &str) -> Result<(Direction, Direction), Failure> {
    let (m, p) = text.split_once(',').ok_or_else(|| usage("--solves-dir expects METHOD,PROBLEM"))?;
    Ok((m.parse().map_err(usage)?, p.parse().map_err(usage)?))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { ontology, strict, json } => {
            let o = load_ontology(&ontology.ontology, err)?;
            let violations = o.validate(strict);
            if json {
                let _ = writeln!(out, "{}", sorted_json(&json!({ "count": violations.len(), "violations": violations })));
            } else {
                for v in &violations {
                    let _ = writeln!(out, "{v}");
                }
                let _ = writeln!(out, "{} violations", violations.len());
            }
            Ok(if violations.is_empty() { EXIT_OK } else { EXIT_DOMAIN })
        }
        Command::Stats { ontology, json } => {
            let s = load_ontology(&ontology.ontology, err)?.stats();
            if json {
                let _ = writeln!(out, "{}", sorted_json(&s));
            } else {
                let _ = writeln!(out, "classes: {}\nisa edges: {}\nother edges: {}", s.class_count, s.isa_edge_count, s.other_edge_count);
                for (k, n) in &s.per_kind {
                    let _ = writeln!(out, "  {k}: {n}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::Materialize { ontology, out: path, rules, solves_dir } => {
            let o = load_ontology(&ontology.ontology, err)?;
            let mut config = match rules {
                Some(r) => ReasonerConfig::with_rules(r),
                None => ReasonerConfig::default(),
            };
            if let Some(d) = solves_dir {
                (config.solves_method_direction, config.solves_problem_direction) = parse_solves_dir(&d)?;
            }
            let g = materialize(&o, &config).map_err(|e| domain(e.to_string()))?;
            write_file(&path, &serialize_materialized(&o, &g))?;
            let _ = writeln!(out, "{} edges ({} inferred)", g.len(), g.inferred_only().len());
            Ok(EXIT_OK)
        }
        Command::Align { ontology, dataset, root_category, depth, out: path, json } => {
            let o = load_ontology(&ontology.ontology, err)?;
            let d = parse_dataset(&read(&dataset)?).map_err(|e| {
                domain(e.iter().map(|e| format!("{}:{e}", dataset.display())).collect::<Vec<_>>().join("\n"))
            })?;
            let mut config = AlignmentConfig::new(root_category);
            config.max_depth = depth;
            let links = align(&o, &d, &config);
            write_file(&path, &emit_close_match(&links))?;
            if json {
                let _ = writeln!(out, "{}", sorted_json(&links));
            } else {
                let _ = writeln!(out, "{} links for {} classes", links.len(), links.iter().map(|l| l.class_id).collect::<BTreeSet<_>>().len());
            }
            Ok(EXIT_OK)
        }
        Command::Index { ontology, corpus, out: path } => {
            let o = load_ontology(&ontology.ontology, err)?;
            let c = load_corpus_file(&corpus)?;
            let index = build_index(&c, &o);
            for w in index.warnings() {
                let _ = writeln!(err, "warning: {w}");
            }
            let concepts: serde_json::Map<String, serde_json::Value> =
                index.concepts().map(|(id, n)| (id.to_string(), json!(n))).collect();
            let summary = sorted_json(&json!({
                "builtAgainst": index.built_against(),
                "contentHash": index.content_hash(),
                "concepts": concepts,
                "counts": c.counts(),
                "warnings": index.warnings(),
            }));
            match path {
                Some(p) => write_file(&p, &format!("{summary}\n"))?,
                None => {
                    let _ = writeln!(out, "{summary}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::Search { ontology, corpus, concept, no_subclasses, segments, page, page_size, json } => {
            let o = load_ontology(&ontology.ontology, err)?;
            let c = load_corpus_file(&corpus)?;
            let index = build_index(&c, &o);
            let query = SearchQuery {
                concept_id: concept,
                include_subclasses: !no_subclasses,
                segment_filter: segments.into_iter().collect(),
                page,
                page_size,
            };
            let result = search(&index, &c, &o, &query).map_err(|e| domain(e.to_string()))?;
            if json {
                let _ = writeln!(out, "{}", sorted_json(&result));
            } else {
                let _ = writeln!(out, "{} hits, page {} of size {}", result.total, result.page, result.page_size);
                for h in &result.hits {
                    let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", h.concept_id, h.symbol, h.formula_id, h.segment_type, h.article_id, h.markup);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Assess { gold, submissions, task_root, method_root, no_materialize, json } => {
            let o = load_ontology(&gold, err)?;
            let (task_root, method_root) = match (task_root, method_root) {
                (Some(t), Some(m)) => (t, m),
                (None, None) => infer_roots(&o)?,
                _ => return Err(usage("pass both --task-root and --method-root, or neither")),
            };
            let seeds = o.classes().map(|c| c.id).collect();
            let fragment = extract_fragment(&o, &seeds, task_root, method_root).map_err(|e| domain(e.to_string()))?;
            let config = ScoreConfig { materialize_submission: !no_materialize };
            let mut reports = Vec::new();
            for path in &submissions {
                let s = Submission::from_json(&read(path)?).map_err(|e| domain(format!("{}: {e}", path.display())))?;
                let r = score(&fragment, &s, &config);
                if r.excluded_edge_count > 0 {
                    let _ = writeln!(err, "{}: {} edges excluded", s.participant_id, r.excluded_edge_count);
                }
                reports.push(r);
            }
            let summaries = aggregate(&reports);
            if json {
                let _ = writeln!(out, "{}", sorted_json(&json!({ "reports": reports, "summaries": summaries })));
            } else {
                let _ = write!(out, "{}", render_table(&summaries));
            }
            Ok(EXIT_OK)
        }
        Command::Serve { config, ontology, corpus, links, dataset, port, base_iri } => {
            let mut cfg = match config {
                Some(p) => ServiceConfig::from_json_file(&p).map_err(|e| usage(e.to_string()))?,
                None => {
                    let (Some(o), Some(c), Some(l)) = (ontology.clone(), corpus.clone(), links.clone()) else {
                        return Err(usage("serve needs --config or all of --ontology, --corpus and --links"));
                    };
                    ServiceConfig::new(o, c, l)
                }
            };
            if let Some(p) = ontology {
                cfg.ontology_path = p;
            }
            if let Some(p) = corpus {
                cfg.corpus_path = p;
            }
            if let Some(p) = links {
                cfg.links_path = p;
            }
            if dataset.is_some() {
                cfg.dataset_path = dataset;
            }
            if let Some(p) = port {
                cfg.port = p;
            }
            if let Some(b) = base_iri {
                cfg.base_iri = b;
            }
            let cfg = cfg.with_env(std::env::var(PORT_ENV).ok()).map_err(|e| usage(e.to_string()))?;
            let snapshot = Snapshot::load(&cfg).map_err(|e| domain(e.to_string()))?;
            for w in &snapshot.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| domain(e.to_string()))?;
            runtime.block_on(crate::service::serve(Hub::new(cfg, snapshot))).map_err(|e| domain(e.to_string()))?;
            Ok(EXIT_OK)
        }
    }
}

fn load_corpus_file(path: &Path) -> Result<ontohub_core::mathsearch::Corpus, Failure> {
    load_corpus(&read(path)?).map_err(|errors| {
        let lines: Vec<String> = errors.iter().map(|e| format!("{}:{}: {}", path.display(), e.line, e.message)).collect();
        domain(lines.join("\n"))
    })
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
