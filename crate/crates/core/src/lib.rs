//! Exact-arithmetic workbench for tropical curves in Delzant domains.

pub mod lattice;
pub mod curve;
pub mod error;
pub mod halfspace;
pub mod domain;
pub mod multiplicity;
pub mod topology;
pub mod io;
pub mod workbench;
