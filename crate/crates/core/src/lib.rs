//! Rack placement for geo-distributed data centers.
//!
//! A WAN of candidate sites is turned into a shortest-path delay matrix and a
//! failure accessibility matrix. A placement of racks over the sites is then
//! scored by survivability (the worst-case fraction of racks that stay
//! reachable from a gateway after any single shared-risk-group failure) and
//! interconnection latency (the largest delay between two active sites). The
//! [`optimizer`] finds the placement maximizing `(1 - beta) * s - beta * l / l_max`
//! to certified optimality, and sweeps `beta` to trace the trade-off frontier.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod audit;
pub mod error;
pub mod failures;
pub mod lp;
pub mod metrics;
pub mod milp;
pub mod model;
pub mod optimizer;
pub mod oracle;
mod search;
pub mod topology;

pub use error::{Error, ErrorKind};
pub use failures::{
    accessible_subnetworks, disconnection_matrix, AccessibleSubnetworks, Component,
    DisconnectionMatrix, Srg, SrgCatalog,
};
pub use metrics::{evaluate, latency, objective, survivability, MetricReport, Placement};
pub use model::build_model;
pub use optimizer::{
    beta_grid, solve, sweep, DesignInstance, DesignResult, Frontier, OptimalityStatus,
    ParetoPoint, SolveConfig,
};
pub use oracle::oracle_solve;
pub use topology::{
    delay_matrix, delay_of_length, haversine_km, DelayMatrix, Link, Site, Topology,
    DEFAULT_SPEED_MPS, EARTH_RADIUS_KM,
};

/// Absolute tolerance for comparing delays, in milliseconds.
pub const DELAY_TOLERANCE_MS: f64 = 1e-9;

/// Absolute tolerance under which two objective values count as tied.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-9;
