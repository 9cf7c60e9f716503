//! Browser bindings for the demo page in `www/`.

pub mod api;

use wasm_bindgen::prelude::*;

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub struct Demo {
    hub: api::Hub,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        Demo { hub: api::Hub::bundled() }
    }

    pub fn suggest(&self, prefix: &str, lang: &str, limit: usize) -> Result<String, JsValue> {
        js(self.hub.suggest(prefix, lang, limit))
    }

    pub fn search(&self, concept: &str, subclasses: bool, segments: &str, page: usize, page_size: usize) -> Result<String, JsValue> {
        js(self.hub.search(concept, subclasses, segments, page, page_size))
    }

    pub fn details(&self, formula_id: &str) -> Result<String, JsValue> {
        js(self.hub.details(formula_id))
    }

    pub fn assess(&self, submission_json: &str) -> Result<String, JsValue> {
        js(self.hub.assess(submission_json))
    }
}

impl Default for Demo {
    fn default() -> Self {
        Demo::new()
    }
}

#[wasm_bindgen]
pub fn materialize(turtle: &str, rules: &str) -> Result<String, JsValue> {
    js(api::materialize_text(turtle, rules))
}

#[wasm_bindgen(js_name = sampleSubmission)]
pub fn sample_submission() -> String {
    api::SAMPLE_SUBMISSION.to_string()
}
