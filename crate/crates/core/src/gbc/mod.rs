//! Boundary and interior harmonic coordinates, their k-local truncations,
//! identity checks and on-disk persistence.

mod compute;
mod design;
mod identities;
pub mod persist;

pub use compute::{FieldId, GbcEngine, GbcSet, LocalGbc, Provenance};
pub use design::DesignPair;
pub use identities::{verify_gbc_identities, IdentityReport};
