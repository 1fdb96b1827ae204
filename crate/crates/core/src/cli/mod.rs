//! Command-line front end: configuration, pipeline assembly and output files.

pub mod config;
pub mod format;
pub mod run;

pub use config::{ExperimentConfig, ModeName};
pub use format::{csv_row, format_float};
pub use run::{run_experiment, run_from_file, Experiment, Subcommand};
