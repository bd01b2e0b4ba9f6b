//! Scenario loading, trajectory records and the subcommands behind the
//! `corrflux` binary.

pub mod commands;
pub mod records;
pub mod scenario;
