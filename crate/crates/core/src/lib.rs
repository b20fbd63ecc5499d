//! Split-step quantum walk on a semi-infinite Fock-state lattice.

pub mod analysis;
pub mod error;
pub mod lattice;
pub mod momentum;
pub mod pulse;
pub mod quench;

pub use error::{Error, Result};
pub use lattice::{BoundaryPhase, BulkParams, Spin, StepFrame, StepMatrix, WalkerState};
