//! Library behind the `momcut` command-line tool: dataset ingestion,
//! end-to-end comparisons, and report/curve output.

#![forbid(unsafe_code)]

pub mod config;
pub mod dataset;
pub mod error;
pub mod output;
pub mod pipeline;

pub use config::{
    Generator, PerDensity, Priors, ProductGenerator, RunConfig, SpectrumOptions, Subcommand,
};
pub use dataset::{load_dataset, rescale_to_unit};
pub use error::{CliError, Result};
pub use output::{emit_curves, emit_report};
pub use pipeline::{compare, Comparison, Comparison2d, Curves, Curves2d};
