//! Contraction certificates: diagonal weight search, certificate issuance,
//! and witnesses showing that no weighted `L^p` certificate with `p > 1`
//! exists for the enzyme model.

mod certificate;
mod impossibility;
mod search;

pub use certificate::{issue_certificate, ContractionCertificate};
pub use impossibility::{impossibility_search, ImpossibilityWitness, DEFAULT_B_CAP};
pub use search::{search_weights, WeightSearch, WeightSpace};
