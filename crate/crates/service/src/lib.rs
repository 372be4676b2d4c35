//! Command-line and HTTP access to the reopen simulator, with replayable run manifests.

pub mod api;
pub mod cli;
pub mod commands;
pub mod config;
pub mod manifest;
