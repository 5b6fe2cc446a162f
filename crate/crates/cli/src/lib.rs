//! Reproducible experiments on the ising-core library.
//!
//! Every command returns an [`ExperimentReport`]: a parameter echo, a table
//! whose columns carry method tags and error bounds, and named pass/fail
//! checks.

pub mod commands;
pub mod report;

pub use commands::{
    cmd_contour_verify, cmd_corollary, cmd_exact_gap, cmd_mc_gap, cmd_peierls, exit_code, ContourVerifyOptions,
    CorollaryOptions, ExactGapOptions, McGapOptions, Model, PeierlsOptions,
};
pub use report::{Column, ExperimentReport, OutputFormat, Tag};
