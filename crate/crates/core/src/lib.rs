//! Bottom-up mining of composition leads among IoT services.
//!
//! Services are described by operations with typed inputs and outputs,
//! pre- and postconditions, observable states and the people using them.
//! [`mining::mine`] relates every pair of services through four recognition
//! predicates, keeps pairs whose correlation degree clears `zeta`, and
//! ranks the survivors by an interestingness score built from
//! actionability, novelty and domain diversity.

mod bits;
pub mod error;
pub mod harness;
pub mod mining;
pub mod model;
pub mod recognition;
#[cfg(feature = "schema")]
pub mod schema;
pub mod scoring;
pub mod synth;

pub use error::{Error, Result};
pub use mining::{mine, Lead, LeadStatus, NoveltyRegistry, ReviewDecision, Verifier, VerifierStrategy};
pub use model::{ServiceDescription, Violation};
pub use recognition::{recognize, Direction, RecognitionVector};
pub use scoring::{MiningConfig, Scores};
pub use synth::{generate_repository, GeneratorParams, RepositoryFile};
