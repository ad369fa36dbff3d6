//! Bollobás-Riordan preferential-attachment multigraphs: generation, first
//! and second degree census, limiting constant tables, exact expectation
//! oracles and a Monte-Carlo harness.

pub mod analytic;
pub mod edgelist;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod multigraph;
pub mod numeric;
pub mod oracle;
pub mod statistics;

pub use error::{Error, Result};
pub use generator::{generate, generate_collapsed, replicate_seed};
pub use multigraph::{AttachmentHistory, MultiGraph, Vertex};
pub use numeric::Mode;
pub use statistics::{joint_counts, JointCounts};

/// Version tag written into every output header.
pub const VERSION_TAG: &str = "pa-secdeg v1";
