//! Namespace and term IRIs.

pub const OMPRO: &str = "http://ontomathpro.org/ontology/";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_IS_DEFINED_BY: &str = "http://www.w3.org/2000/01/rdf-schema#isDefinedBy";
pub const OMPRO_DEFINITION: &str = "http://ontomathpro.org/ontology/definition";
pub const SKOS_BROADER: &str = "http://www.w3.org/2004/02/skos/core#broader";
pub const SKOS_CLOSE_MATCH: &str = "http://www.w3.org/2004/02/skos/core#closeMatch";
pub const FOAF_PRIMARY_TOPIC: &str = "http://xmlns.com/foaf/0.1/primaryTopic";
pub const FOAF_IS_PRIMARY_TOPIC_OF: &str = "http://xmlns.com/foaf/0.1/isPrimaryTopicOf";
pub const DCTERMS_SUBJECT: &str = "http://purl.org/dc/terms/subject";

/// Prefixes written at the top of every serialized document, in output order.
pub const STANDARD_PREFIXES: [(&str, &str); 4] =
    [("ompro", OMPRO), ("owl", OWL), ("rdfs", RDFS), ("skos", SKOS)];
