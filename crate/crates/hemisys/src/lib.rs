//! Hemisystems of the Hermitian surface H(3,p²) from Fuhrmann–Torres maximal
//! curves, for primes p = 1 + 4a², together with the strongly regular graphs
//! and two-weight linear codes they generate.
//!
//! Pipeline layout:
//! - [`ff`]: the field tower GF(p) ⊂ GF(p²) ⊂ GF(p⁴)
//! - [`geom`]: PG(3,q²)/PG(5,q), the Hermitian surface and its generators
//! - [`curve`]: the curves X⁺/X⁻, imaginary chords, generator classification
//! - [`group`]: the invariance group 𝔊 and its index-2 subgroup 𝔥
//! - [`lemmas`]: exhaustive checks of the tangent-case lemma suite and the
//!   Landau-prime point counts
//! - [`hemi`]: hemisystem assembly, verification, certificates
//! - [`graphs`]: strongly regular graph construction and verification
//! - [`codes`]: Klein correspondence, m-ovoid, two-weight codes

pub mod codes;
pub mod curve;
pub mod ff;
pub mod geom;
pub mod graphs;
pub mod group;
pub mod hemi;
pub mod lemmas;

use thiserror::Error as ThisError;

/// File-format version stamped into every exported artifact.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, ThisError)]
pub enum Error {
    /// Invalid configuration (bad prime, missing tower constant).
    #[error("configuration error: {0}")]
    Config(String),
    /// Operation applied outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input fails a pipeline precondition (e.g. non-Landau prime).
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A quantity the underlying theory guarantees came out wrong.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    /// Internal consistency check failed; indicates a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),
    /// Construction-time warranty check failed.
    #[error("construction error: {0}")]
    Construction(String),
    /// Problem size beyond the configured bound.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}
