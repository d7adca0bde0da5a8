//! The verification lab: seeded generators, checkers for every inequality
//! and identity, the batch suite and its reports.

pub mod checks;
pub mod generate;
pub mod suite;
pub mod report;
