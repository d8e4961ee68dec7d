//! File formats, reports and the command line for `mia-audit-core`.
//!
//! Grids are read from `.miag` files or `scores.csv`/`mask.csv` directories
//! ([`gridio`]); every command writes CSV/JSON reports ([`report`]) and a
//! `manifest.json` with input/output digests ([`manifest`]) into its output
//! directory.

pub mod cli;
pub mod gridio;
pub mod manifest;
pub mod report;

pub use gridio::{load_grid, save_grid, GridFileError, GridFormat};
