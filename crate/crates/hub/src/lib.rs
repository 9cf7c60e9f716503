//! Command line and HTTP service over ontology snapshots.

pub mod cli;
pub mod negotiate;
pub mod service;
pub mod snapshot;

pub use service::{router, sorted_json, Hub};
pub use snapshot::{ServiceConfig, Snapshot, Sources};
