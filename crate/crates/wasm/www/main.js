import init, { Demo, materialize, sampleSubmission } from "./pkg/ontohub_wasm.js";

const $ = (id) => document.getElementById(id);

function fail(target, e) {
  target.className = "error";
  target.textContent = String(e);
}

function ok(target, text) {
  target.className = "";
  target.textContent = text;
}

await init();
const demo = new Demo();
let concept = null;

$("turtle").value = `@prefix ompro: <http://ontomathpro.org/ontology/> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .

ompro:E1 a owl:Class ; rdfs:label "Problem"@en .
ompro:E2 a owl:Class ; rdfs:label "Linear problem"@en ; rdfs:subClassOf ompro:E1 .
ompro:E3 a owl:Class ; rdfs:label "Linear system"@en ; rdfs:subClassOf ompro:E2 .
`;
$("submission").value = sampleSubmission();

function refreshSuggestions() {
  const list = $("suggestions");
  list.replaceChildren();
  const prefix = $("prefix").value.trim();
  if (!prefix) return;
  try {
    for (const s of JSON.parse(demo.suggest(prefix, $("lang").value, 10))) {
      const li = document.createElement("li");
      li.textContent = `${s.display} (${s.conceptId ?? s.externalIri}, ${s.source})`;
      if (s.conceptId) li.onclick = () => { concept = s.conceptId; runSearch(); };
      list.append(li);
    }
  } catch (e) {
    const li = document.createElement("li");
    fail(li, e);
    list.append(li);
  }
}

function runSearch() {
  const box = $("hits");
  box.replaceChildren();
  $("details").textContent = "";
  if (!concept) return;
  let page;
  try {
    page = JSON.parse(demo.search(concept, $("subclasses").checked, $("segments").value, 1, 50));
  } catch (e) {
    fail(box, e);
    return;
  }
  const head = document.createElement("p");
  head.textContent = `${page.total} hits for ${concept}`;
  const ul = document.createElement("ul");
  for (const h of page.hits) {
    const li = document.createElement("li");
    const a = document.createElement("a");
    a.href = "#";
    a.textContent = `${h.symbol}  ${h.markup}`;
    a.onclick = (ev) => {
      ev.preventDefault();
      try { ok($("details"), JSON.stringify(JSON.parse(demo.details(h.formulaId)), null, 2)); }
      catch (e) { fail($("details"), e); }
    };
    li.append(a, ` ${h.segmentType} in ${h.articleId} (${h.conceptId})`);
    ul.append(li);
  }
  box.append(head, ul);
}

$("prefix").addEventListener("input", refreshSuggestions);
$("lang").addEventListener("change", refreshSuggestions);
$("subclasses").addEventListener("change", runSearch);
$("segments").addEventListener("change", runSearch);

$("run-materialize").onclick = () => {
  try {
    const r = JSON.parse(materialize($("turtle").value, $("rules").value));
    ok($("materialize-summary"), `${r.asserted} asserted, ${r.inferred} inferred`);
    ok($("materialized"), r.turtle);
  } catch (e) {
    $("materialized").textContent = "";
    fail($("materialize-summary"), e);
  }
};

$("run-assess").onclick = () => {
  try {
    const r = JSON.parse(demo.assess($("submission").value));
    ok($("table"), `${r.table}\nexcluded edges: ${r.report.excludedEdgeCount}`);
  } catch (e) {
    fail($("table"), e);
  }
};
