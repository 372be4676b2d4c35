//! Production-network simulation of lockdown and reopening shocks, paired with an
//! activity-decomposed epidemic reproduction number.
//!
//! The usual entry point is [`Dataset`], which loads a calibrated directory, and
//! [`engine::Model`], which steps the economy one day at a time.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod data;
mod dataset;
pub mod engine;
pub mod epi;
mod error;
pub mod scenario;

pub use dataset::{
    bundled_data_dir, load_dataset, load_dataset_with, synthetic_dataset_files,
    write_synthetic_dataset, Dataset,
};
pub use error::{Error, ErrorKind, Result};
