//! Independent oracles and random fixture generators shared by the
//! integration and acceptance tests.
//!
//! The oracles deliberately take the slow, obvious route (naive fixpoints,
//! Floyd-Warshall, brute-force scans) and share no code with the library
//! beyond its data types.

pub mod generate;
pub mod oracle;

use std::path::PathBuf;

/// Path of a file under the workspace `fixtures/` directory.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    let path = fixture(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}
