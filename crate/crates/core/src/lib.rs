//! Coordinate computations for the generalized Tripathi connection on a
//! Finsler manifold: jets, metric data, connections, their torsions and
//! curvatures, and the identity checks that tie them together.

pub mod ad;
pub mod cases;
pub mod config;
pub mod connection;
pub mod error;
pub mod expr;
pub mod finsler;
pub mod processes;
pub mod tripathi;
pub mod verify;

pub use error::{Error, Result};
