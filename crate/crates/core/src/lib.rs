//! Fleet size and mix vehicle routing with time windows for mobile
//! fast-charging vehicles.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the immutable problem data and parameter derivations.
//! * [`eval`] schedules routes, validates solutions and prices them; it is
//!   the single source of truth every solver is measured against.
//! * [`exact`] enumerates or branches to optimality on small instances.
//! * [`heuristic`] scales to realistic sizes with adaptive destroy/repair.
//! * [`milp`] writes the arc-based model in LP format and imports external
//!   solver assignments.
//! * [`io`] covers file formats and synthetic scenario generation.

pub mod error;
pub mod eval;
pub mod exact;
pub mod heuristic;
pub mod io;
pub mod milp;
pub mod model;

pub use error::{Error, Result};
