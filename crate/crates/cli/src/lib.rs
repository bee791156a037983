//! Command line front end: configuration, verification suites, solver runs
//! and corollary tables.

pub mod commands;
pub mod config;
pub mod suites;
