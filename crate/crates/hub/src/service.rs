//! HTTP routes over the current snapshot.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;
use serde_json::json;

use ontohub_core::mathsearch::{
    hit_details, search, suggest, SearchError, SearchQuery, SegmentType, DEFAULT_PAGE_SIZE, MAX_SUGGESTIONS,
};
use ontohub_core::turtle::TurtleWriter;
use ontohub_core::{ClassId, Edge, Lang, MatchMode, Ontology};

use crate::negotiate::{negotiate, Representation};
use crate::snapshot::{ServiceConfig, Snapshot, SnapshotError};

pub const DEFAULT_SUGGEST_LIMIT: usize = 10;

#[derive(Clone)]
pub struct Hub {
    inner: Arc<Inner>,
}

struct Inner {
    config: ServiceConfig,
    snapshot: RwLock<Arc<Snapshot>>,
}

impl Hub {
    pub fn new(config: ServiceConfig, snapshot: Snapshot) -> Self {
        Hub { inner: Arc::new(Inner { config, snapshot: RwLock::new(Arc::new(snapshot)) }) }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.inner.config
    }

    /// The snapshot a request should use from start to finish.
    pub fn current(&self) -> Arc<Snapshot> {
        self.inner.snapshot.read().expect("snapshot lock poisoned").clone()
    }

    pub fn replace(&self, snapshot: Snapshot) -> Arc<Snapshot> {
        let fresh = Arc::new(snapshot);
        *self.inner.snapshot.write().expect("snapshot lock poisoned") = fresh.clone();
        fresh
    }

    /// Rebuilds from the configured paths. On failure the old snapshot stays.
    pub fn reload(&self) -> Result<Arc<Snapshot>, SnapshotError> {
        let snapshot = Snapshot::load(&self.inner.config)?;
        Ok(self.replace(snapshot))
    }
}

/// JSON text with object keys in sorted order.
pub fn sorted_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("response types serialize");
    serde_json::to_string(&value).expect("values serialize")
}

fn json_response<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], sorted_json(value)).into_response()
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    json_response(status, &json!({ "error": message.into() }))
}

pub fn router(hub: Hub) -> Router {
    Router::new()
        .route("/ontology/{id}", get(dereference))
        .route("/api/lookup", get(lookup))
        .route("/api/suggest", get(suggest_handler))
        .route("/api/search", get(search_handler))
        .route("/api/formulas/{id}", get(details))
        .route("/admin/reload", post(reload))
        .with_state(hub)
}

type Params = Query<BTreeMap<String, String>>;

fn parse_lang(v: &str) -> Result<Lang, Response> {
    v.parse().map_err(|_| error(StatusCode::BAD_REQUEST, format!("lang must be en or ru, got {v:?}")))
}

fn class_json(ontology: &Ontology, config: &ServiceConfig, id: ClassId) -> serde_json::Value {
    let class = ontology.class(id).expect("caller checked");
    let mut edges = adjacent(ontology, id);
    edges.sort();
    let edges: Vec<_> = edges
        .iter()
        .map(|e| {
            json!({
                "subject": e.subject,
                "subjectIri": config.iri(e.subject),
                "relation": e.kind.to_string(),
                "kind": e.kind.name(),
                "object": e.object,
                "objectIri": config.iri(e.object),
            })
        })
        .collect();
    let mut body = json!({
        "id": id,
        "iri": config.iri(id),
        "labels": class.labels,
        "edges": edges,
    });
    if let Ok(t) = ontology.taxonomy_of(id) {
        body["taxonomy"] = json!(t);
    }
    if let Some(d) = &class.definition_text {
        body["definitionText"] = json!(d);
    }
    if let Some(u) = &class.definition_url {
        body["definitionUrl"] = json!(u);
    }
    body
}

fn adjacent(ontology: &Ontology, id: ClassId) -> Vec<Edge> {
    let (out, inc) = ontology.adjacent_edges(id);
    let set: BTreeSet<Edge> = out.into_iter().chain(inc).collect();
    set.into_iter().collect()
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn class_html(ontology: &Ontology, config: &ServiceConfig, id: ClassId) -> String {
    let class = ontology.class(id).expect("caller checked");
    let title = class.labels_in(Lang::En).next().or(class.labels.first()).map(|l| l.text.as_str()).unwrap_or("");
    let mut out = String::new();
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{id} {}</title></head><body>\n<h1>{id} {}</h1>\n<p><code>{}</code></p>\n<ul>\n",
        escape(title),
        escape(title),
        escape(&config.iri(id))
    );
    for l in &class.labels {
        let _ = writeln!(out, "<li lang=\"{}\">{}</li>", l.lang, escape(&l.text));
    }
    out.push_str("</ul>\n");
    if let Some(d) = &class.definition_text {
        let _ = writeln!(out, "<p>{}</p>", escape(d));
    }
    if let Some(u) = &class.definition_url {
        let _ = writeln!(out, "<p><a href=\"{0}\">{0}</a></p>", escape(u));
    }
    out.push_str("<table>\n");
    for e in adjacent(ontology, id) {
        let _ = writeln!(
            out,
            "<tr><td><a href=\"{}\">{}</a></td><td>{} {}</td><td><a href=\"{}\">{}</a></td></tr>",
            e.subject, e.subject, e.kind, e.kind.name(), e.object, e.object
        );
    }
    out.push_str("</table>\n</body></html>\n");
    out
}

async fn dereference(State(hub): State<Hub>, Path(raw): Path<String>, headers: HeaderMap) -> Response {
    let id: ClassId = match raw.parse() {
        Ok(id) => id,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("{e}")),
    };
    let snap = hub.current();
    let config = hub.config();
    if !snap.ontology.contains(id) {
        return error(StatusCode::NOT_FOUND, format!("class {id} not found"));
    }
    let accept = headers.get(header::ACCEPT).map(|v| v.to_str().unwrap_or("\u{0}"));
    let Some(repr) = negotiate(accept) else {
        return error(StatusCode::NOT_ACCEPTABLE, "supported types: application/json, text/turtle, text/html");
    };
    let (body, media) = match repr {
        Representation::Json => (sorted_json(&class_json(&snap.ontology, config, id)), "application/json"),
        Representation::Turtle => {
            let text = TurtleWriter::with_namespace(config.base_iri.clone())
                .class_fragment(&snap.ontology, id)
                .expect("class present");
            (text, "text/turtle; charset=utf-8")
        }
        Representation::Html => (class_html(&snap.ontology, config, id), "text/html; charset=utf-8"),
    };
    (StatusCode::OK, [(header::CONTENT_TYPE, media), (header::VARY, "Accept")], body).into_response()
}

async fn lookup(State(hub): State<Hub>, Query(params): Params) -> Response {
    let Some(label) = params.get("label").filter(|l| !l.trim().is_empty()) else {
        return error(StatusCode::BAD_REQUEST, "missing label parameter");
    };
    let lang = match params.get("lang").map(|v| parse_lang(v)).transpose() {
        Ok(l) => l.unwrap_or(Lang::En),
        Err(r) => return r,
    };
    let mode = match params.get("mode").map(|v| v.parse::<MatchMode>()).transpose() {
        Ok(m) => m.unwrap_or(MatchMode::Exact),
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let snap = hub.current();
    let found: Vec<_> = snap
        .ontology
        .find_labels(label, lang, mode)
        .into_iter()
        .map(|(id, l)| json!({ "classId": id, "iri": hub.config().iri(id), "matchedLabel": l.text }))
        .collect();
    json_response(StatusCode::OK, &found)
}

async fn suggest_handler(State(hub): State<Hub>, Query(params): Params) -> Response {
    let Some(q) = params.get("q").filter(|q| !q.trim().is_empty()) else {
        return error(StatusCode::BAD_REQUEST, "missing q parameter");
    };
    let lang = match params.get("lang").map(|v| parse_lang(v)).transpose() {
        Ok(l) => l,
        Err(r) => return r,
    };
    let limit = match params.get("limit").map(|v| v.parse::<usize>()) {
        None => DEFAULT_SUGGEST_LIMIT,
        Some(Ok(n)) if (1..=MAX_SUGGESTIONS).contains(&n) => n,
        Some(_) => return error(StatusCode::BAD_REQUEST, format!("limit must be between 1 and {MAX_SUGGESTIONS}")),
    };
    let snap = hub.current();
    match suggest(&snap.ontology, &snap.links, &snap.dataset, q, lang, limit) {
        Ok(list) => json_response(StatusCode::OK, &list),
        Err(e) => error(StatusCode::BAD_REQUEST, e.to_string()),
    }
}

/// Builds a library query from request parameters.
pub fn parse_search_query(params: &BTreeMap<String, String>) -> Result<SearchQuery, String> {
    let concept = params.get("concept").ok_or("missing concept parameter")?;
    let mut q = SearchQuery::new(concept.parse::<ClassId>().map_err(|e| e.to_string())?);
    if let Some(v) = params.get("subclasses") {
        q.include_subclasses = match v.as_str() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => return Err(format!("subclasses must be true or false, got {other:?}")),
        };
    }
    if let Some(v) = params.get("segments") {
        for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            q.segment_filter.insert(name.parse::<SegmentType>()?);
        }
    }
    let number = |key: &str, default: usize| -> Result<usize, String> {
        match params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("{key} must be a non-negative integer")),
        }
    };
    q.page = number("page", 1)?;
    q.page_size = number("pageSize", DEFAULT_PAGE_SIZE)?;
    Ok(q)
}

async fn search_handler(State(hub): State<Hub>, Query(params): Params) -> Response {
    let q = match parse_search_query(&params) {
        Ok(q) => q,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let snap = hub.current();
    match search(&snap.index, &snap.corpus, &snap.ontology, &q) {
        Ok(page) => json_response(StatusCode::OK, &page),
        Err(e @ SearchError::UnknownConcept(_)) => error(StatusCode::NOT_FOUND, e.to_string()),
        Err(e @ SearchError::StaleIndex) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::BAD_REQUEST, e.to_string()),
    }
}

async fn details(State(hub): State<Hub>, Path(id): Path<String>) -> Response {
    let snap = hub.current();
    match hit_details(&snap.corpus, &id) {
        Ok(d) => json_response(StatusCode::OK, &d),
        Err(e) => error(StatusCode::NOT_FOUND, format!("formula {} not found", e.0)),
    }
}

async fn reload(State(hub): State<Hub>) -> Response {
    let h = hub.clone();
    match tokio::task::spawn_blocking(move || h.reload()).await {
        Ok(Ok(snap)) => json_response(StatusCode::OK, &json!({ "contentHash": snap.content_hash })),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

/// Serves until the process is stopped; SIGHUP reloads the snapshot.
pub async fn serve(hub: Hub) -> std::io::Result<()> {
    let port = hub.config().checked_port().map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let mut hup = signal(SignalKind::hangup())?;
        let h = hub.clone();
        tokio::spawn(async move {
            while hup.recv().await.is_some() {
                let h2 = h.clone();
                match tokio::task::spawn_blocking(move || h2.reload()).await {
                    Ok(Ok(s)) => eprintln!("reloaded snapshot {}", s.content_hash),
                    Ok(Err(e)) => eprintln!("reload failed, keeping old snapshot: {e}"),
                    Err(e) => eprintln!("reload failed: {e}"),
                }
            }
        });
    }
    axum::serve(listener, router(hub)).await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_json_orders_keys() {
        #[derive(Serialize)]
        struct T {
            zeta: u8,
            alpha: u8,
        }
        assert_eq!(sorted_json(&T { zeta: 1, alpha: 2 }), r#"{"alpha":2,"zeta":1}"#);
    }

    #[test]
    fn search_params() {
        let p = |pairs: &[(&str, &str)]| pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let q = parse_search_query(&p(&[("concept", "E660"), ("segments", "theorem,proof"), ("subclasses", "false")])).unwrap();
        assert_eq!(q.segment_filter.len(), 2);
        assert!(!q.include_subclasses);
        assert!(parse_search_query(&p(&[("concept", "E660"), ("segments", "poem")])).is_err());
        assert!(parse_search_query(&p(&[("concept", "660")])).is_err());
        assert!(parse_search_query(&p(&[])).is_err());
        assert_eq!(parse_search_query(&p(&[("concept", "E1"), ("page", "0")])).unwrap().page, 0);
    }

    #[test]
    fn html_escapes() {
        assert_eq!(escape("<a href=\"x\">&'"), "&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
    }
}
