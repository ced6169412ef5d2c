//! File formats, model documents, plots and the `gdpsom` command line built
//! on top of [`gdpsom_core`].

pub mod cli;
pub mod documents;
mod error;
pub mod features;
pub mod hitmap;
pub mod manifest;
pub mod panel;

pub use error::{Error, Result};

/// Tool version recorded in manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
