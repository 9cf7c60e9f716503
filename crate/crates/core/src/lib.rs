//! Ontology store, reasoner, dataset alignment, formula search and
//! competence assessment for a bilingual mathematical knowledge hub.

pub mod assess;
pub mod dataset;
pub mod interlink;
pub mod mathsearch;
pub mod ontology;
pub mod reasoner;
pub mod turtle;
pub mod vocab;

pub use ontology::{
    ClassId, Edge, Label, Lang, MatchMode, Ontology, OntologyBuilder, OntologyClass, RelationKind, Roots, Stats,
    Taxonomy, Violation, ViolationCode,
};
pub use turtle::{parse_turtle, serialize_turtle, ParseError};
