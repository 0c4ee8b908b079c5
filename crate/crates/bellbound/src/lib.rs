//! Command line, JSON file formats and a threaded worker pool for
//! `bellbound-core`.

pub mod commands;
pub mod curve;
pub mod files;
pub mod report;
pub mod runner;

pub use bellbound_core as core;
