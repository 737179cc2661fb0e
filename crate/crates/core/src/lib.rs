//! Exact-arithmetic laboratory for line/2-plane incidences in R⁴.
//!
//! The crate is organised bottom-up:
//!
//! - [`exact`]: rationals, polynomials, Sturm sequences, resultants.
//! - [`geometry`]: lines, 2-flats and hyperplanes with exact incidence tests.
//! - [`config`]: seeded configuration generators and the configuration file format.
//! - [`partition`]: polynomial partitioning by lifted ham-sandwich cuts and
//!   exact cell-crossing statistics.
//! - [`counting`]: brute-force incidence counting, incidence graphs,
//!   Zarankiewicz oracles and rich-flat detection.
//! - [`bounds`]: certified evaluation of the incidence bound formulas.
//! - [`harness`]: end-to-end experiments and bound grids.

pub mod exact;
pub mod config;
pub mod geometry;
pub mod partition;
pub mod counting;
pub mod bounds;
pub mod harness;
