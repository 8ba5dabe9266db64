//! Boolean network tomography: exact maximal identifiability of node
//! failures from end-to-end path measurements.
//!
//! The crate builds graphs and monitor placements, materializes measurement
//! paths (or a reachability oracle for walk routing), and searches for the
//! largest `k` such that any two node sets of size at most `k` are crossed by
//! different path sets.

pub mod agrid;
pub mod bitset;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod graphml;
pub mod ident;
pub mod placement;
pub mod rng;
pub mod routing;
pub mod topology;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use graph::Graph;
pub use ident::{compute_mu, compute_mu_truncated, IdentReport};
pub use placement::MonitorPlacement;
pub use routing::RoutingScheme;
