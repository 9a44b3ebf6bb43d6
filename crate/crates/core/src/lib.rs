//! Staged construction of uniquely extensive embeddings into the generic
//! poset, with brute-force audits.

pub mod chain;
pub mod io;
pub mod moiety;
pub mod poset;
pub mod types;
pub mod verify;
